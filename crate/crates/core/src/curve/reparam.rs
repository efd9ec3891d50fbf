use std::sync::Arc;

use serde::Serialize;

use super::homeo::invert_monotone;
use super::variation::{uniform_grid, variation, ProfileRow};
use super::{Curve, Homeomorphism, Interval};
use crate::error::{Error, Result};

/// Variation below which a grid cell counts as a constancy cell.
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-12;

const CONSTANCY_DEPTH: u32 = 6;

/// `v_f` evaluated at arbitrary parameters: prefix sums over a grid plus a
/// fixed number of chords inside the cell containing the parameter.
///
/// Within a cell `v(t)` is the length of the `sub`-chord polygon on
/// `[gᵢ, t]`, which equals the grid prefix sum at the cell ends. The map is
/// therefore continuous and, for curves that are not constant on any cell,
/// strictly increasing.
#[derive(Clone, Debug)]
pub struct ArcLengthMap {
    curve: Curve,
    grid: Vec<f64>,
    cum: Vec<f64>,
    sub: usize,
}

impl ArcLengthMap {
    pub fn with_resolution(curve: &Curve, cells: usize, sub: usize) -> Self {
        let d = curve.domain();
        let grid = uniform_grid(d.lo, d.hi, cells.max(1) + 1);
        let mut map = ArcLengthMap {
            curve: curve.clone(),
            grid,
            cum: Vec::new(),
            sub: sub.max(1),
        };
        let mut cum = Vec::with_capacity(map.grid.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in map.grid.windows(2) {
            acc += map.local(w[0], w[1]);
            cum.push(acc);
        }
        map.cum = cum;
        map
    }

    /// Doubles the number of cells until the total length changes by less
    /// than `tol` relative.
    pub fn converged(curve: &Curve, tol: f64) -> Self {
        let sub = 64;
        let mut cells = 64;
        let mut map = ArcLengthMap::with_resolution(curve, cells, sub);
        while cells < 1 << 14 {
            cells *= 2;
            let next = ArcLengthMap::with_resolution(curve, cells, sub);
            let done = (next.total() - map.total()).abs() <= tol * next.total().max(1.0);
            map = next;
            if done {
                break;
            }
        }
        map
    }

    fn local(&self, lo: f64, t: f64) -> f64 {
        if t <= lo {
            return 0.0;
        }
        let h = (t - lo) / self.sub as f64;
        let mut prev = self.curve.at(lo);
        let mut acc = 0.0;
        for i in 1..=self.sub {
            let x = if i == self.sub { t } else { lo + h * i as f64 };
            let p = self.curve.at(x);
            acc += self.curve.dist(&p, &prev);
            prev = p;
        }
        acc
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn domain(&self) -> Interval {
        self.curve.domain()
    }

    /// `v_f(t)`.
    pub fn v(&self, t: f64) -> f64 {
        let g = &self.grid;
        if t <= g[0] {
            return 0.0;
        }
        if t >= *g.last().unwrap() {
            return self.total();
        }
        let i = g.partition_point(|&x| x <= t) - 1;
        (self.cum[i] + self.local(g[i], t)).min(self.cum[i + 1])
    }

    /// Smallest `t` with `v_f(t) = s`.
    pub fn inverse(&self, s: f64) -> f64 {
        let g = &self.grid;
        if s <= 0.0 {
            return g[0];
        }
        if s >= self.total() {
            return *g.last().unwrap();
        }
        let i = self.cum.partition_point(|&c| c < s).max(1) - 1;
        let cell = Interval {
            lo: g[i],
            hi: g[i + 1],
        };
        invert_monotone(&|t| self.v(t), cell, s)
    }
}

/// Maximal intervals on which the curve is constant, resolved to the grid.
///
/// A cell is flagged when both its chord and a short dyadic refinement of its
/// variation are below `tol`; runs of flagged cells are merged and their ends
/// pushed into the neighbouring cells by bisection. Constancy shorter than
/// two grid cells may go unreported.
pub fn constancy_intervals(curve: &Curve, grid_size: usize, tol: f64) -> Result<Vec<Interval>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 2, got {grid_size}"
        )));
    }
    let d = curve.domain();
    let grid = uniform_grid(d.lo, d.hi, grid_size);
    let flat = |lo: f64, hi: f64| -> bool {
        curve.chord(lo, hi) < tol
            && variation(curve, lo, hi, CONSTANCY_DEPTH)
                .map(|v| v.value < tol)
                .unwrap_or(false)
    };
    let cells: Vec<bool> = grid.windows(2).map(|w| flat(w[0], w[1])).collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        if !cells[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < cells.len() && cells[i] {
            i += 1;
        }
        let (mut lo, mut hi) = (grid[start], grid[i]);
        if start > 0 {
            let anchor = lo;
            lo = extend(grid[start - 1], anchor, |x| flat(x, anchor));
        }
        if i < cells.len() {
            let anchor = hi;
            hi = extend(grid[i + 1], anchor, |x| flat(anchor, x));
        }
        out.push(Interval { lo, hi });
    }
    Ok(out)
}

/// Moves from `anchor` towards `limit` as far as `ok` stays true.
fn extend(limit: f64, anchor: f64, ok: impl Fn(f64) -> bool) -> f64 {
    let (mut good, mut bad) = (anchor, limit);
    if ok(limit) {
        return limit;
    }
    for _ in 0..60 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// `g = f ∘ v_f⁻¹` on `[0, v_f(b)]`, with `v_f` as a homeomorphism.
///
/// Refuses curves with a detectable constancy interval, where `v_f` is not
/// invertible; [`phi_reparam`] handles those.
pub fn arc_length_reparameterize(curve: &Curve, tol: f64) -> Result<(Curve, Homeomorphism)> {
    if let Some(u) = constancy_intervals(curve, 1025, DEFAULT_CONSTANCY_TOL)?.first() {
        return Err(Error::ConstancyInterval { lo: u.lo, hi: u.hi });
    }
    let map = Arc::new(ArcLengthMap::converged(curve, tol));
    let d = curve.domain();
    let total = map.total();
    let (m1, m2) = (map.clone(), map.clone());
    let vf = Homeomorphism::from_fns(
        "arc_length",
        d,
        Interval { lo: 0.0, hi: total },
        move |t| m1.v(t),
        move |s| m2.inverse(s),
    );
    let f = curve.clone();
    let m3 = map.clone();
    let mut g = Curve::new(
        Interval { lo: 0.0, hi: total },
        curve.space().clone(),
        move |s| f.at(m3.inverse(s)),
    )
    .with_lipschitz(1.0)
    .with_label(format!("arc-length({})", curve.label));
    g.breakpoints = curve
        .breakpoints
        .iter()
        .map(|&t| map.v(t))
        .filter(|&s| 0.0 < s && s < total)
        .collect();
    g.tail_bound = curve.tail_bound;
    Ok((g, vf))
}

/// Data of the reparameterization `φ(t) = v_f(t) + λ(U ∩ [a, t])`, where `U`
/// is the union of the constancy intervals.
#[derive(Clone, Debug)]
pub struct ReparamPlan {
    pub constancy_intervals: Vec<Interval>,
    pub phi: Homeomorphism,
    /// Components of `[a, b] \ U`.
    pub regular_components: Vec<Interval>,
    pub total_variation: f64,
    map: Arc<ArcLengthMap>,
    curve: Curve,
}

#[derive(Serialize)]
struct PlanJson<'a> {
    constancy_intervals: &'a [Interval],
    regular_components: &'a [Interval],
    total_variation: f64,
    constancy_measure: f64,
    phi_end: f64,
    rows: Vec<ProfileRow>,
}

impl ReparamPlan {
    pub fn constancy_measure(&self) -> f64 {
        self.constancy_intervals.iter().map(Interval::len).sum()
    }

    pub fn v_f(&self, t: f64) -> f64 {
        self.map.v(t)
    }

    /// `f ∘ φ⁻¹` on `[0, φ(b)]`.
    pub fn reparameterized(&self) -> Curve {
        let f = self.curve.clone();
        let phi = self.phi.clone();
        Curve::new(self.phi.range(), self.curve.space().clone(), move |s| {
            f.at(f.clamp(phi.inverse(s)))
        })
        .with_lipschitz(1.0)
        .with_label(format!("phi-reparam({})", self.curve.label))
    }

    /// `(t, v_f(t), φ(t))` on a uniform grid of `n` points.
    pub fn rows(&self, n: usize) -> Vec<ProfileRow> {
        let d = self.phi.domain();
        uniform_grid(d.lo, d.hi, n.max(2))
            .into_iter()
            .map(|t| ProfileRow {
                t,
                v_f: self.map.v(t),
                phi: Some(self.phi.forward(t)),
            })
            .collect()
    }

    pub fn to_json(&self, n: usize) -> serde_json::Value {
        serde_json::to_value(PlanJson {
            constancy_intervals: &self.constancy_intervals,
            regular_components: &self.regular_components,
            total_variation: self.total_variation,
            constancy_measure: self.constancy_measure(),
            phi_end: self.phi.range().hi,
            rows: self.rows(n),
        })
        .expect("plan serializes")
    }
}

/// Builds `φ(t) = v_f(t) + λ(U ∩ [a, t])`, strictly increasing even where
/// `f` is constant, so that `f ∘ φ⁻¹` is 1-Lipschitz.
pub fn phi_reparam(curve: &Curve, grid_size: usize, depth: u32) -> Result<ReparamPlan> {
    let d = curve.domain();
    let check = variation(curve, d.lo, d.hi, depth.clamp(12, 20))?;
    if !check.looks_convergent() || !check.value.is_finite() {
        return Err(Error::UnboundedVariation {
            increment: check.last_increment(),
            depth: check.depth,
        });
    }
    let u = constancy_intervals(curve, grid_size, DEFAULT_CONSTANCY_TOL)?;
    let sub = 1usize << depth.min(8);
    let map = Arc::new(ArcLengthMap::with_resolution(curve, grid_size - 1, sub));
    let total_variation = map.total();

    let uu = u.clone();
    let m = map.clone();
    let phi_fn = move |t: f64| -> f64 {
        let lebesgue: f64 = uu.iter().map(|i| (t.min(i.hi) - i.lo).max(0.0)).sum();
        m.v(t) + lebesgue
    };
    let phi_fn = Arc::new(phi_fn);
    let end = phi_fn(d.hi);
    let (f1, f2) = (phi_fn.clone(), phi_fn.clone());
    let phi = Homeomorphism::from_fns(
        "phi",
        d,
        Interval { lo: 0.0, hi: end },
        move |t| f1(t),
        move |s| invert_monotone(&*f2, d, s),
    );

    let mut regular_components = Vec::new();
    let mut cursor = d.lo;
    for i in &u {
        if i.lo > cursor {
            regular_components.push(Interval {
                lo: cursor,
                hi: i.lo,
            });
        }
        cursor = cursor.max(i.hi);
    }
    if cursor < d.hi {
        regular_components.push(Interval {
            lo: cursor,
            hi: d.hi,
        });
    }

    Ok(ReparamPlan {
        constancy_intervals: u,
        phi,
        regular_components,
        total_variation,
        map,
        curve: curve.clone(),
    })
}

/// `t ↦ f(h(t))` on the domain of `h`.
pub fn compose(curve: &Curve, h: &Homeomorphism) -> Result<Curve> {
    let d = curve.domain();
    let r = h.range();
    let tol = 1e-12 * d.len().abs().max(1.0);
    if (r.lo - d.lo).abs() > tol || (r.hi - d.hi).abs() > tol {
        return Err(Error::DomainMismatch {
            range_lo: r.lo,
            range_hi: r.hi,
            a: d.lo,
            b: d.hi,
        });
    }
    let f = curve.clone();
    let hh = h.clone();
    let mut out = Curve::new(h.domain(), curve.space().clone(), move |t| {
        f.at(f.clamp(hh.forward(t)))
    })
    .with_label(format!("{}∘{}", curve.label, h.kind));
    let hd = h.domain();
    out.breakpoints = curve
        .breakpoints
        .iter()
        .map(|&t| h.inverse(t))
        .filter(|&w| hd.lo < w && w < hd.hi)
        .collect();
    out.tail_bound = curve.tail_bound;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    fn plateau() -> Curve {
        Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| {
            (t.min(0.25) + (t - 0.5).max(0.0), 0.0)
        })
        .unwrap()
    }

    fn parabola() -> Curve {
        Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t, 0.5 * t * t)).unwrap()
    }

    #[test]
    fn constancy_of_segment_and_plateau() {
        assert!(
            constancy_intervals(&Curve::segment(0.0, 1.0).unwrap(), 101, 1e-12)
                .unwrap()
                .is_empty()
        );
        let u = constancy_intervals(&plateau(), 101, 1e-12).unwrap();
        assert_eq!(u.len(), 1);
        assert!(
            (u[0].lo - 0.25).abs() < 1e-12 && (u[0].hi - 0.5).abs() < 1e-12,
            "{u:?}"
        );
        // Off-grid ends are recovered by the bisection step.
        let u = constancy_intervals(&plateau(), 37, 1e-12).unwrap();
        assert!(
            (u[0].lo - 0.25).abs() < 1e-12 && (u[0].hi - 0.5).abs() < 1e-12,
            "{u:?}"
        );
    }

    #[test]
    fn rescaled_segment() {
        let f = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (2.0 * t, 0.0)).unwrap();
        let (g, vf) = arc_length_reparameterize(&f, 1e-10).unwrap();
        assert!((g.domain().hi - 2.0).abs() < 1e-12);
        for s in [0.0f64, 0.3, 1.1, 2.0] {
            let p = g.eval(s.min(g.domain().hi)).unwrap();
            assert!((p.x() - s).abs() < 1e-12 && p.y() == 0.0);
        }
        assert!((vf.forward(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arc_length_refuses_constancy() {
        assert!(matches!(
            arc_length_reparameterize(&plateau(), 1e-9),
            Err(Error::ConstancyInterval { .. })
        ));
    }

    #[test]
    fn parabola_reparam_is_one_lipschitz() {
        let (g, _) = arc_length_reparameterize(&parabola(), 1e-12).unwrap();
        let l = g.domain().hi;
        let mut pairs = Vec::new();
        for i in 0..200 {
            let s = l * i as f64 / 200.0;
            for dt in [1e-7, 1e-5, 1e-3, 0.1, 0.5] {
                if s + dt <= l {
                    pairs.push((s, s + dt));
                }
            }
        }
        assert!(g.max_pair_ratio(&pairs) <= 1.0 + 1e-6);
    }

    #[test]
    fn phi_of_plateau() {
        let plan = phi_reparam(&plateau(), 101, 8).unwrap();
        assert!((plan.phi.forward(1.0) - 1.0).abs() < 1e-9);
        assert!((plan.total_variation - 0.75).abs() < 1e-12);
        assert!(
            (plan.constancy_measure() - 0.25).abs() < 1e-10,
            "{:?}",
            plan.constancy_intervals
        );
        assert_eq!(plan.regular_components.len(), 2);
        plan.phi.check(513, 1e-9).unwrap();
    }

    #[test]
    fn phi_of_constant_curve_is_a_shift() {
        let c = Curve::planar(2.0, 3.0, NormSpec::Euclidean2d, |_| (1.0, 1.0)).unwrap();
        let plan = phi_reparam(&c, 11, 4).unwrap();
        for t in [2.0, 2.3, 3.0] {
            assert!((plan.phi.forward(t) - (t - 2.0)).abs() < 1e-12);
        }
        assert!(plan.regular_components.is_empty());
    }

    #[test]
    fn phi_of_segment_is_identity() {
        let plan = phi_reparam(&Curve::segment(0.0, 1.0).unwrap(), 51, 4).unwrap();
        for t in [0.0, 0.17, 0.5, 1.0] {
            assert!((plan.phi.forward(t) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_rejects_unbounded_variation() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| {
            if t == 0.0 {
                (0.0, 0.0)
            } else {
                (t, t * (1.0 / t).sin())
            }
        })
        .unwrap();
        assert!(matches!(
            phi_reparam(&c, 11, 16),
            Err(Error::UnboundedVariation { .. })
        ));
    }

    #[test]
    fn compose_with_identity_and_mismatch() {
        let f = parabola();
        let id = Homeomorphism::identity(f.domain());
        let g = compose(&f, &id).unwrap();
        assert_eq!(g.at(0.3), f.at(0.3));
        let wrong = Homeomorphism::identity(Interval::new(0.0, 2.0).unwrap());
        assert!(matches!(
            compose(&f, &wrong),
            Err(Error::DomainMismatch { .. })
        ));
    }
}
