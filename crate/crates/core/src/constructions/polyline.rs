use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

use super::{sampled_pair_ratio, PairCertificate};
use crate::curve::{Curve, Interval};
use crate::error::{Error, Result};
use crate::norm::{validate_norm_spec, NormSpec, Vector};

const SEGMENT_BUDGET: usize = 4000;
const MAX_DOUBLINGS: usize = 60;
const EPSILON_HALVINGS: usize = 16;
const S_GRID: usize = 64;
const CERT_SAMPLES: usize = 20_000;

/// A polygonal replacement for the stitched spiral curve in an arbitrary
/// planar norm, unit-speed in that norm.
#[derive(Clone, Debug, Serialize)]
pub struct PolylineSpiral {
    /// The input norm rescaled so that `‖(1, 0)‖ = 1`.
    pub norm: NormSpec,
    pub q: f64,
    pub alpha: f64,
    /// Slope increment between consecutive segments.
    pub epsilon: f64,
    /// Number of slope increments on each side before turning back.
    pub turns: (usize, usize),
    /// `(t, g(t))` at every corner, in increasing `t`.
    pub knots: Vec<(f64, [f64; 2])>,
    pub certificate: PairCertificate,
    #[serde(skip)]
    pub curve: Curve,
}

fn rescale(spec: &NormSpec) -> Result<NormSpec> {
    let c = spec.norm(&[1.0, 0.0]);
    Ok(match spec {
        NormSpec::PolygonGauge { vertices } => NormSpec::PolygonGauge {
            vertices: vertices.iter().map(|[x, y]| [x * c, y * c]).collect(),
        },
        NormSpec::L2Truncated { .. } => {
            return Err(Error::InvalidParameter(
                "polyline spirals need a planar norm".into(),
            ))
        }
        other => other.clone(),
    })
}

fn mirror(spec: &NormSpec) -> NormSpec {
    match spec {
        NormSpec::PolygonGauge { vertices } => NormSpec::PolygonGauge {
            vertices: vertices.iter().map(|[x, y]| [-x, *y]).collect(),
        },
        other => other.clone(),
    }
}

struct Side {
    knots: Vec<(f64, [f64; 2])>,
    turns: usize,
}

fn end_ratio(norm: &NormSpec, t: f64, p: [f64; 2]) -> f64 {
    (0..=S_GRID)
        .map(|i| {
            let s = i as f64 / S_GRID as f64;
            norm.norm(&[p[0] - s, p[1]]) / (t - s)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Appends a segment of slope `−slope` that doubles from half the current
/// parameter until the end ratio exceeds `target`.
fn push_segment(
    norm: &NormSpec,
    knots: &mut Vec<(f64, [f64; 2])>,
    slope: f64,
    target: f64,
) -> Result<()> {
    let &(t, p) = knots.last().expect("side has its start knot");
    let raw = [1.0, -slope];
    let n = norm.norm(&raw);
    let d = [raw[0] / n, raw[1] / n];
    let mut len = 0.5 * t;
    for _ in 0..MAX_DOUBLINGS {
        let end = [p[0] + len * d[0], p[1] + len * d[1]];
        if end_ratio(norm, t + len, end) > target {
            knots.push((t + len, end));
            return Ok(());
        }
        len *= 2.0;
    }
    Err(Error::Construction(format!(
        "segment of slope {slope} never recovers the ratio {target}"
    )))
}

/// Segments of slope `−ε, −2ε, …` until the chord from `(1/2, 0)` points
/// below `−α`, then back down to slope 0.
fn build_side(norm: &NormSpec, q: f64, alpha: f64, eps: f64) -> Result<Side> {
    let target = 0.5 * (1.0 + q);
    let mut knots: Vec<(f64, [f64; 2])> = vec![(1.0, [1.0, 0.0])];
    let mut turns = 0;
    loop {
        let &(t, p) = knots.last().expect("nonempty");
        if !(t.is_finite() && p[0].is_finite() && p[1].is_finite()) || t > 1e150 {
            return Err(Error::Construction(format!(
                "polyline overflows at eps = {eps}"
            )));
        }
        if p[1].atan2(p[0] - 0.5) < -alpha {
            break;
        }
        turns += 1;
        if 2 * turns > SEGMENT_BUDGET {
            return Err(Error::Construction(format!(
                "turning past alpha = {alpha} needs more than {SEGMENT_BUDGET} segments at eps = {eps}"
            )));
        }
        push_segment(norm, &mut knots, turns as f64 * eps, target)?;
    }
    for k in (0..turns).rev() {
        push_segment(norm, &mut knots, k as f64 * eps, target)?;
    }
    Ok(Side { knots, turns })
}

fn interpolate(knots: &[(f64, [f64; 2])], t: f64) -> (f64, f64) {
    let i = knots.partition_point(|(s, _)| *s <= t);
    if i == 0 {
        let (_, p) = knots[0];
        return (p[0], p[1]);
    }
    if i == knots.len() {
        let (_, p) = knots[knots.len() - 1];
        return (p[0], p[1]);
    }
    let (s0, p0) = knots[i - 1];
    let (s1, p1) = knots[i];
    let w = (t - s0) / (s1 - s0);
    (p0[0] + w * (p1[0] - p0[0]), p0[1] + w * (p1[1] - p0[1]))
}

/// Joins the right side, the unit segment and the mirror image of the left
/// side, each side followed by a horizontal ray of nine times its length.
fn assemble(right: &Side, left: &Side) -> Vec<(f64, [f64; 2])> {
    let extend = |side: &Side| {
        let mut k = side.knots.clone();
        let &(t, p) = k.last().expect("side has its start knot");
        k.push((10.0 * t, [p[0] + 9.0 * t, p[1]]));
        k
    };
    let mut knots: Vec<(f64, [f64; 2])> = extend(left)
        .into_iter()
        .rev()
        .map(|(t, [x, y])| (1.0 - t, [1.0 - x, y]))
        .collect();
    knots.extend(extend(right));
    knots
}

fn polyline_curve(norm: &NormSpec, knots: Vec<(f64, [f64; 2])>, label: String) -> Result<Curve> {
    let domain = Interval::new(knots[0].0, knots[knots.len() - 1].0)?;
    let breakpoints: Vec<f64> = knots[1..knots.len() - 1].iter().map(|k| k.0).collect();
    let knots = Arc::new(knots);
    Ok(Curve::new(domain, norm.clone(), move |t| {
        let (x, y) = interpolate(&knots, t);
        Vector::planar(x, y)
    })
    .with_breakpoints(breakpoints)?
    .with_lipschitz(1.0)
    .with_label(label))
}

/// Searches `ε = 2·tan α, tan α, …` and returns the first polyline whose
/// sampled pair ratio over `s ∈ [0, 1]` exceeds `q`.
pub fn build_polyline_spiral(norm: &NormSpec, q: f64, alpha: f64) -> Result<PolylineSpiral> {
    validate_norm_spec(norm).map_err(|v| Error::InvalidParameter(format!("{v:?}")))?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, π/2), got {alpha}"
        )));
    }
    let norm = rescale(norm)?;
    let mirrored = mirror(&norm);
    let mut eps = 2.0 * alpha.tan();
    let mut diagnostics = Vec::new();
    for _ in 0..EPSILON_HALVINGS {
        let built = build_side(&norm, q, alpha, eps)
            .and_then(|r| build_side(&mirrored, q, alpha, eps).map(|l| (r, l)));
        match built {
            Ok((right, left)) => {
                let knots = assemble(&right, &left);
                let curve = polyline_curve(
                    &norm,
                    knots.clone(),
                    format!("polyline(q={q}, alpha={alpha}, eps={eps})"),
                )?;
                let certificate = sampled_pair_ratio(&curve, CERT_SAMPLES, 0x5eed);
                if certificate.min_ratio > q {
                    return Ok(PolylineSpiral {
                        norm,
                        q,
                        alpha,
                        epsilon: eps,
                        turns: (right.turns, left.turns),
                        knots,
                        certificate,
                        curve,
                    });
                }
                diagnostics.push(format!(
                    "eps {eps}: sampled ratio {}",
                    certificate.min_ratio
                ));
            }
            Err(e) => diagnostics.push(format!("eps {eps}: {e}")),
        }
        eps *= 0.5;
    }
    Err(Error::Construction(format!(
        "no certified polyline for q = {q}, alpha = {alpha}: {}",
        diagnostics.join("; ")
    )))
}
