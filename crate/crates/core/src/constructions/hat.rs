use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::choose_b;
use super::spiral::SpiralParams;
use crate::curve::{Curve, Interval};
use crate::error::{Error, Result};
use crate::norm::{NormSpec, Vector};
use crate::sets::ClosedSet;

/// Parameters of the recursive hat construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatCurveSpec {
    pub depth: usize,
    /// `α_1, …, α_N`, increasing towards π/2.
    pub alphas: Vec<f64>,
    /// `q_1, …, q_N`, increasing towards 1.
    pub qs: Vec<f64>,
    /// Explicit spiral parameters per level; chosen by [`choose_b`] when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs: Option<Vec<f64>>,
    pub theta_1: f64,
    /// `L_n` is this factor times the smallest admissible value.
    pub l_margin: f64,
    pub b_grid: f64,
}

impl HatCurveSpec {
    /// `α_n = (π/2)(1 − 2^{−n})`, `q_n = 1 − 2^{−n−1}`, `θ_1 = 0.4`.
    pub fn default_schedule(depth: usize) -> Self {
        HatCurveSpec {
            depth,
            alphas: (1..=depth)
                .map(|n| FRAC_PI_2 * (1.0 - 2f64.powi(-(n as i32))))
                .collect(),
            qs: (1..=depth)
                .map(|n| 1.0 - 2f64.powi(-(n as i32) - 1))
                .collect(),
            bs: None,
            theta_1: 0.4,
            l_margin: 1.1,
            b_grid: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.depth;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "hat depth must be at least 1".into(),
            ));
        }
        if self.alphas.len() != n || self.qs.len() != n {
            return Err(Error::InvalidParameter(format!(
                "depth {n} needs {n} alphas and qs, got {} and {}",
                self.alphas.len(),
                self.qs.len()
            )));
        }
        if let Some(bs) = &self.bs {
            if bs.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "depth {n} needs {n} values of b"
                )));
            }
        }
        if !(self.theta_1 > 0.0 && self.theta_1 < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "theta_1 must lie in (0, 1/2), got {}",
                self.theta_1
            )));
        }
        if !(self.l_margin > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "l_margin must exceed 1, got {}",
                self.l_margin
            )));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.alphas) || !increasing(&self.qs) {
            return Err(Error::InvalidParameter(
                "alpha and q schedules must be increasing".into(),
            ));
        }
        Ok(())
    }
}

/// One level of the construction: the spiral graph `F_n`, its rescaled hat
/// `G_n` and the constants derived from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HatLevel {
    pub n: usize,
    pub alpha: f64,
    pub q: f64,
    pub spiral: SpiralParams,
    /// `F_n` is constant for `|v| ≥ x_n`.
    pub x_n: f64,
    /// Length of the graph of `F_n` over `[−x_n, x_n]`.
    pub graph_length: f64,
    #[serde(rename = "L_n")]
    pub big_l: f64,
    /// Length of the graph of `G_n` over `[−a_n, a_n]`.
    pub p_n: f64,
    pub a_n: f64,
    /// Arc length from either end of the level frame to the plateau.
    pub side: f64,
    /// Spiral parameters at the two ends of the level frame.
    pub t_left: f64,
    pub t_right: f64,
}

impl HatLevel {
    /// Left end of the frame in spiral coordinates: `((1 − L_n)/2, y_min)`.
    fn base(&self) -> (f64, f64) {
        (0.5 * (1.0 - self.big_l), self.spiral.y_min)
    }

    /// `F(X)`: the height of the spiral graph above abscissa `X`.
    fn spiral_height(&self, x: f64) -> f64 {
        let p = &self.spiral;
        let x = if x < 0.5 { 1.0 - x } else { x };
        if x <= 1.0 {
            return 0.0;
        }
        if x >= p.x_far {
            return p.y_min;
        }
        let (mut lo, mut hi) = (1.0, 1.0 + p.l);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if p.g(mid).0 < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        p.g(0.5 * (lo + hi)).1
    }

    /// `F_n(v) = 2·F(v/2 + 1/2)`, even with plateau `[−1, 1]`.
    pub fn f_n(&self, v: f64) -> f64 {
        2.0 * self.spiral_height(0.5 * v + 0.5)
    }

    /// `G_n(x) = (F_n(L_n·x) − F_n(L_n))/L_n`.
    pub fn g_n(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        (self.f_n(self.big_l * x) - 2.0 * self.spiral.y_min) / self.big_l
    }
}

/// Builds level `n` (1-based) of `spec`.
pub fn build_hat_level(n: usize, spec: &HatCurveSpec) -> Result<HatLevel> {
    spec.validate()?;
    if n == 0 || n > spec.depth {
        return Err(Error::InvalidParameter(format!(
            "level {n} outside 1..={}",
            spec.depth
        )));
    }
    let (alpha, q) = (spec.alphas[n - 1], spec.qs[n - 1]);
    let b = match &spec.bs {
        Some(bs) => bs[n - 1],
        None => choose_b(q, alpha, spec.b_grid)?,
    };
    let spiral = SpiralParams::new(q, alpha, b)?;
    let x_n = 2.0 * spiral.x_far - 1.0;
    let graph_length = 2.0 * (1.0 + 2.0 * spiral.l);
    let big_l = spec.l_margin * (x_n + n as f64 * graph_length);
    let t_right = 1.0 + spiral.l + 0.5 * (1.0 + big_l) - spiral.x_far;
    let level = HatLevel {
        n,
        alpha,
        q,
        x_n,
        graph_length,
        big_l,
        p_n: graph_length / big_l,
        a_n: x_n / big_l,
        side: t_right - 1.0,
        t_left: 1.0 - t_right,
        t_right,
        spiral,
    };
    if !(level.big_l.is_finite() && level.p_n > 0.0 && level.side.is_finite()) {
        return Err(Error::Construction(format!(
            "level {n} constants are not representable; reduce the depth"
        )));
    }
    Ok(level)
}

/// A finite binary address `ε_1 ε_2 …`: `ε_n = 0` picks the interval of
/// `𝒢_n` at the left end of its parent, `1` the right one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CantorCode {
    pub bits: Vec<u8>,
}

impl CantorCode {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|b| *b > 1) {
            return Err(Error::InvalidParameter(format!(
                "a Cantor code is a nonempty 0/1 sequence, got {bits:?}"
            )));
        }
        Ok(CantorCode { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl FromStr for CantorCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidParameter(format!("bad Cantor code {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        CantorCode::new(bits)
    }
}

impl fmt::Display for CantorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CantorPoint {
    pub code: CantorCode,
    /// Centre of the addressed interval of `𝒢_len`.
    pub x: f64,
    pub bracket: Interval,
    /// `2·θ_len`.
    pub width: f64,
}

/// `ψ_k(t) = (t + 2/k)/(1 − 2/k)`.
pub fn psi(k: usize, t: f64) -> Result<f64> {
    if k <= 2 {
        return Err(Error::InvalidParameter(format!("psi needs k > 2, got {k}")));
    }
    let e = 2.0 / k as f64;
    Ok((t + e) / (1.0 - e))
}

/// The isosceles spike of a level-`n` hat around a Cantor point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpikeCheck {
    pub n: usize,
    pub chord: f64,
    pub arc: f64,
    /// `chord/arc`.
    pub ratio: f64,
    pub cos_alpha: f64,
    /// Whether the Cantor point lies strictly between the two spike ends.
    pub straddles: bool,
}

/// Largest sampled `H¹(γ[c, c + t])/|γ(c + t) − γ(c)|` for `c + t` to the
/// right of the level-`n + 1` interval containing `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiCheck {
    pub n: usize,
    pub samples: usize,
    pub max_ratio: f64,
    /// `max(ψ_{n+1}(1/q_{n+1}), ψ_{n+1}(ψ_{n+1}(1)), ψ_{n+1}(1 + 2/(n+1)))`.
    pub bound: f64,
    pub passed: bool,
}

/// How level `n` nests level `n + 1` on its plateau.
#[derive(Clone, Debug, PartialEq, Serialize)]
struct Nesting {
    /// Width of each child on the unit plateau.
    w: f64,
    /// Scale from child frame to parent frame.
    r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HatCurve {
    pub spec: HatCurveSpec,
    pub levels: Vec<HatLevel>,
    pub thetas: Vec<f64>,
    /// `𝒢_1, …, 𝒢_N` in global coordinates.
    pub g_families: Vec<Vec<Interval>>,
    /// `ℱ_1, …, ℱ_N` in global coordinates.
    pub f_families: Vec<Vec<Interval>>,
    nest: Vec<Nesting>,
    /// Arc length of each level frame with all deeper levels inserted.
    frame_len: Vec<f64>,
    plateau_len: Vec<f64>,
    root: Nesting,
    pub total_length: f64,
    /// `Σ_{k>N} θ_k < θ_N/L_N`.
    pub tail_bound: f64,
    /// Arc-length parameterization of the graph of `S_N` over `[−1, 1]`.
    #[serde(skip)]
    pub curve: Curve,
}

/// Builds `S_N` with its interval families and the arc-length
/// parameterized graph.
pub fn build_cantor_hat_curve(spec: &HatCurveSpec) -> Result<HatCurve> {
    spec.validate()?;
    let depth = spec.depth;
    let levels = (1..=depth)
        .map(|n| build_hat_level(n, spec))
        .collect::<Result<Vec<_>>>()?;
    let mut thetas = vec![spec.theta_1];
    for n in 1..depth {
        let (th, lv, next) = (thetas[n - 1], &levels[n - 1], &levels[n]);
        let t = 0.9 * (th * lv.p_n / (4.0 * next.p_n)).min(th / (2.0 * lv.big_l));
        if !(t > 0.0 && t.is_normal()) {
            return Err(Error::Construction(format!(
                "theta underflows at level {}; reduce the depth",
                n + 1
            )));
        }
        thetas.push(t);
    }

    let nest: Vec<Nesting> = (0..depth.saturating_sub(1))
        .map(|i| {
            let w = thetas[i + 1] * levels[i].big_l / thetas[i];
            Nesting {
                w,
                r: w / levels[i + 1].big_l,
            }
        })
        .collect();
    let mut frame_len = vec![0.0; depth];
    let mut plateau_len = vec![0.0; depth];
    for i in (0..depth).rev() {
        plateau_len[i] = if i + 1 == depth {
            1.0
        } else {
            1.0 - 2.0 * nest[i].w + 2.0 * nest[i].r * frame_len[i + 1]
        };
        frame_len[i] = 2.0 * levels[i].side + plateau_len[i];
    }
    let w1 = 2.0 * spec.theta_1;
    let root = Nesting {
        w: w1,
        r: w1 / levels[0].big_l,
    };
    let total_length = 2.0 - 2.0 * w1 + 2.0 * root.r * frame_len[0];

    let mut g_families = Vec::with_capacity(depth);
    let mut f_families = Vec::with_capacity(depth);
    let mut parents = vec![Interval { lo: -1.0, hi: 1.0 }];
    for (i, lv) in levels.iter().enumerate() {
        let th = thetas[i];
        let g: Vec<Interval> = parents
            .iter()
            .flat_map(|p| {
                [
                    Interval {
                        lo: p.lo,
                        hi: p.lo + 2.0 * th,
                    },
                    Interval {
                        lo: p.hi - 2.0 * th,
                        hi: p.hi,
                    },
                ]
            })
            .collect();
        let f: Vec<Interval> = g
            .iter()
            .map(|iv| {
                let rho = iv.mid();
                Interval {
                    lo: rho - th / lv.big_l,
                    hi: rho + th / lv.big_l,
                }
            })
            .collect();
        parents = f.clone();
        g_families.push(g);
        f_families.push(f);
    }

    let mut hat = HatCurve {
        spec: spec.clone(),
        tail_bound: thetas[depth - 1] / levels[depth - 1].big_l,
        levels,
        thetas,
        g_families,
        f_families,
        nest,
        frame_len,
        plateau_len,
        root,
        total_length,
        curve: Curve::segment(0.0, 1.0)?,
    };
    let shared = Arc::new(hat.clone());
    let breakpoints: Vec<f64> = hat
        .pieces(2)
        .iter()
        .skip(1)
        .map(|p| p.0)
        .filter(|&s| s > 0.0 && s < total_length)
        .collect();
    hat.curve = Curve::new(
        Interval::new(0.0, total_length)?,
        NormSpec::Euclidean2d,
        move |s| {
            let (x, y) = shared.graph_point(s);
            Vector::planar(x, y)
        },
    )
    .with_breakpoints(breakpoints)?
    .with_lipschitz(1.0)
    .with_tail_bound(hat.tail_bound)
    .with_label(format!("hat(depth={depth})"));
    Ok(hat)
}

/// Kind of a maximal smooth-ish piece of the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Side,
    Flat,
}

impl HatCurve {
    pub fn depth(&self) -> usize {
        self.spec.depth
    }

    fn level(&self, n: usize) -> &HatLevel {
        &self.levels[n - 1]
    }

    /// Arc length of a level-`n` frame.
    pub fn frame_length(&self, n: usize) -> f64 {
        self.frame_len[n - 1]
    }

    /// Point at arc length `s` of the level-`n` frame, in the spiral
    /// coordinates of level `n` (the plateau is `[0, 1] × {0}`).
    pub fn frame_point(&self, n: usize, s: f64) -> (f64, f64) {
        let lv = self.level(n);
        let p = &lv.spiral;
        if s <= lv.side {
            return p.g(lv.t_left + s);
        }
        let u = s - lv.side;
        let plateau = self.plateau_len[n - 1];
        if u >= plateau {
            return p.g(1.0 + (u - plateau));
        }
        if n == self.depth() {
            return (u, 0.0);
        }
        let Nesting { w, r } = self.nest[n - 1];
        let child_len = r * self.frame_len[n];
        let map = |origin: f64, t: f64| {
            let (cx, cy) = self.frame_point(n + 1, t / r);
            let (bx, by) = self.level(n + 1).base();
            (origin + r * (cx - bx), r * (cy - by))
        };
        if u < child_len {
            map(0.0, u)
        } else if u < child_len + 1.0 - 2.0 * w {
            (w + (u - child_len), 0.0)
        } else {
            map(1.0 - w, u - child_len - (1.0 - 2.0 * w))
        }
    }

    /// `γ(s)` for the arc-length parameter `s ∈ [0, total_length]`.
    pub fn graph_point(&self, s: f64) -> (f64, f64) {
        let Nesting { w, r } = self.root;
        let child_len = r * self.frame_len[0];
        let (bx, by) = self.level(1).base();
        let map = |origin: f64, t: f64| {
            let (cx, cy) = self.frame_point(1, t / r);
            (origin + r * (cx - bx), r * (cy - by))
        };
        if s < child_len {
            map(-1.0, s)
        } else if s < child_len + 2.0 - 2.0 * w {
            (-1.0 + w + (s - child_len), 0.0)
        } else {
            map(1.0 - w, (s - child_len - (2.0 - 2.0 * w)).min(child_len))
        }
    }

    /// `S_n(x)` evaluated directly as a sum of rescaled hats, `n ≤ N`.
    pub fn s_n(&self, n: usize, x: f64) -> f64 {
        let mut total = 0.0;
        let (mut a, mut b) = (-1.0, 1.0);
        for k in 1..=n.min(self.depth()) {
            let th = self.thetas[k - 1];
            let lv = self.level(k);
            let rho = if (x - (a + th)).abs() <= th {
                a + th
            } else if (x - (b - th)).abs() <= th {
                b - th
            } else {
                break;
            };
            total += th * lv.g_n((x - rho) / th);
            let half = th / lv.big_l;
            if (x - rho).abs() > half {
                break;
            }
            a = rho - half;
            b = rho + half;
        }
        total
    }

    /// The graph `x ↦ (x, S_N(x))` on `[−1, 1]`.
    pub fn graph_curve(&self) -> Curve {
        let me = Arc::new(self.clone());
        let n = self.depth();
        Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, move |x| (x, me.s_n(n, x)))
            .expect("euclidean norm is planar")
            .with_label(format!("hat graph(depth={n})"))
    }

    /// The addressed interval of `𝒢_len` in global coordinates.
    pub fn cantor_point(&self, code: &CantorCode) -> Result<CantorPoint> {
        if code.len() > self.depth() {
            return Err(Error::CodeTooLong {
                len: code.len(),
                depth: self.depth(),
            });
        }
        let (mut a, mut b) = (-1.0, 1.0);
        let mut rho = 0.0;
        for (i, bit) in code.bits.iter().enumerate() {
            let th = self.thetas[i];
            rho = if *bit == 0 { a + th } else { b - th };
            let half = th / self.levels[i].big_l;
            a = rho - half;
            b = rho + half;
        }
        let th = self.thetas[code.len() - 1];
        Ok(CantorPoint {
            code: code.clone(),
            x: rho,
            bracket: Interval {
                lo: rho - th,
                hi: rho + th,
            },
            width: 2.0 * th,
        })
    }

    /// Arc position of the coded point on the plateau of its level-`n`
    /// frame, measured from the plateau start.
    fn plateau_position(&self, n: usize, code: &CantorCode) -> f64 {
        if n >= code.len() || n == self.depth() {
            return 0.5;
        }
        let Nesting { w, r } = self.nest[n - 1];
        let offset = if code.bits[n] == 0 {
            0.0
        } else {
            r * self.frame_len[n] + 1.0 - 2.0 * w
        };
        offset + r * (self.level(n + 1).side + self.plateau_position(n + 1, code))
    }

    /// Arc position of the coded point in its level-`n` frame.
    pub fn frame_position(&self, n: usize, code: &CantorCode) -> f64 {
        self.level(n).side + self.plateau_position(n, code)
    }

    /// Arc parameter of the coded point on the global curve.
    pub fn arc_position(&self, code: &CantorCode) -> f64 {
        let Nesting { w, r } = self.root;
        let offset = if code.bits[0] == 0 {
            0.0
        } else {
            r * self.frame_len[0] + 2.0 - 2.0 * w
        };
        offset + r * self.frame_position(1, code)
    }

    fn check_code(&self, code: &CantorCode, n: usize) -> Result<()> {
        if code.len() > self.depth() {
            return Err(Error::CodeTooLong {
                len: code.len(),
                depth: self.depth(),
            });
        }
        if n == 0 || n > code.len() {
            return Err(Error::InvalidParameter(format!(
                "level {n} outside 1..={} for code {code}",
                code.len()
            )));
        }
        Ok(())
    }

    /// Chord over arc between `g(1/2 − t*)` and `g(1/2 + t*)` in the level-`n`
    /// frame containing the coded point.
    pub fn spike_check(&self, code: &CantorCode, n: usize) -> Result<SpikeCheck> {
        self.check_code(code, n)?;
        let lv = self.level(n);
        let p = &lv.spiral;
        let (a, b) = (0.5 - p.t_star, 0.5 + p.t_star);
        let plateau = self.plateau_len[n - 1];
        let left = lv.side + a;
        let right = lv.side + plateau + (b - 1.0);
        let c = self.frame_position(n, code);
        let (u, v) = (self.frame_point(n, left), self.frame_point(n, right));
        let chord = (v.0 - u.0).hypot(v.1 - u.1);
        let arc = right - left;
        Ok(SpikeCheck {
            n,
            chord,
            arc,
            ratio: chord / arc,
            cos_alpha: lv.alpha.cos(),
            straddles: left < c && c < right,
        })
    }

    /// Samples `c + t` from the right end of the level-`n + 1` interval
    /// containing `c` to the right end of the level-`n` interval.
    pub fn psi_check(&self, code: &CantorCode, n: usize, samples: usize) -> Result<PsiCheck> {
        self.check_code(code, n)?;
        if n >= code.len() || n >= self.depth() {
            return Err(Error::InvalidParameter(format!(
                "the psi check at level {n} needs a code of length > {n}"
            )));
        }
        let k = n + 1;
        let q = self.level(k).q;
        let psi1 = psi(k, 1.0)?;
        let bound = psi(k, 1.0 / q)?
            .max(psi(k, psi1)?)
            .max(psi(k, 1.0 + 2.0 / k as f64)?);
        let lv = self.level(n);
        let Nesting { w, r } = self.nest[n - 1];
        let child_end = if code.bits[n] == 0 {
            lv.side + r * self.frame_len[n]
        } else {
            lv.side + self.plateau_len[n - 1]
        };
        let end = self.frame_len[n - 1];
        let c = self.frame_position(n, code);
        let pc = self.frame_point(n, c);
        let span = end - child_end;
        let mut ts: Vec<f64> = (0..=samples)
            .map(|i| child_end + span * i as f64 / samples as f64)
            .collect();
        // Geometric refinement next to the child, where the ratio peaks.
        ts.extend((1..=samples).map(|i| child_end + span * 2f64.powi(-(i as i32).min(60))));
        if code.bits[n] == 0 {
            // Points inside the sibling's plateau region.
            let sib = lv.side + r * self.frame_len[n] + 1.0 - 2.0 * w;
            ts.extend(
                (0..=samples).map(|i| sib + r * self.frame_len[n] * i as f64 / samples as f64),
            );
        }
        let mut max_ratio: f64 = 0.0;
        let mut count = 0;
        for s in ts {
            if s <= c || s > end {
                continue;
            }
            let p = self.frame_point(n, s);
            let chord = (p.0 - pc.0).hypot(p.1 - pc.1);
            if chord > 0.0 {
                max_ratio = max_ratio.max((s - c) / chord);
                count += 1;
            }
        }
        Ok(PsiCheck {
            n,
            samples: count,
            max_ratio,
            bound,
            passed: count > 0 && max_ratio <= bound,
        })
    }

    /// `2 − 4θ_1 + 2Λ_1` with `Λ_n = θ_n(p_n + 2 − 2a_n) + 2Λ_{n+1} − 4θ_{n+1}`,
    /// computed from the level constants alone.
    pub fn length_from_constants(&self) -> f64 {
        let mut lambda = 0.0;
        for i in (0..self.depth()).rev() {
            let lv = &self.levels[i];
            let th = self.thetas[i];
            let below = if i + 1 < self.depth() {
                2.0 * lambda - 4.0 * self.thetas[i + 1]
            } else {
                0.0
            };
            lambda = th * (lv.p_n + 2.0 - 2.0 * lv.a_n) + below;
        }
        2.0 - 4.0 * self.thetas[0] + 2.0 * lambda
    }

    /// Arc intervals of the global curve that are single spiral sides or
    /// flats, down to `max_level`, as `(start, end, level, kind)`.
    pub fn pieces(&self, max_level: usize) -> Vec<(f64, f64, usize, PieceKind)> {
        let mut out = Vec::new();
        let Nesting { w, r } = self.root;
        let child = r * self.frame_len[0];
        let deep = max_level >= 1;
        if deep {
            self.frame_pieces(1, 0.0, r, max_level, &mut out);
        } else {
            out.push((0.0, child, 1, PieceKind::Side));
        }
        out.push((child, child + 2.0 - 2.0 * w, 0, PieceKind::Flat));
        let start = child + 2.0 - 2.0 * w;
        if deep {
            self.frame_pieces(1, start, r, max_level, &mut out);
        } else {
            out.push((start, self.total_length, 1, PieceKind::Side));
        }
        out
    }

    fn frame_pieces(
        &self,
        n: usize,
        offset: f64,
        scale: f64,
        max_level: usize,
        out: &mut Vec<(f64, f64, usize, PieceKind)>,
    ) {
        let side = self.level(n).side * scale;
        let plateau = self.plateau_len[n - 1] * scale;
        out.push((offset, offset + side, n, PieceKind::Side));
        let p0 = offset + side;
        if n == self.depth() || n >= max_level {
            out.push((p0, p0 + plateau, n, PieceKind::Flat));
        } else {
            let Nesting { w, r } = self.nest[n - 1];
            let child = r * self.frame_len[n] * scale;
            self.frame_pieces(n + 1, p0, scale * r, max_level, out);
            out.push((
                p0 + child,
                p0 + child + (1.0 - 2.0 * w) * scale,
                n,
                PieceKind::Flat,
            ));
            self.frame_pieces(
                n + 1,
                p0 + child + (1.0 - 2.0 * w) * scale,
                scale * r,
                max_level,
                out,
            );
        }
        out.push((p0 + plateau, p0 + plateau + side, n, PieceKind::Side));
    }

    /// `count` arc parameters inside sides and flats of levels 0 to 2, away
    /// from their ends, each with its distance to the nearer end.
    pub fn a1_points(&self, count: usize) -> Vec<(f64, f64)> {
        let pieces: Vec<_> = self.pieces(2).into_iter().filter(|p| p.1 > p.0).collect();
        (0..count)
            .map(|i| {
                let (a, b, _, _) = pieces[(i * 7) % pieces.len()];
                let f = 0.2 + 0.6 * ((i as f64 * 0.618_033_988_75).fract());
                let s = a + f * (b - a);
                (s, (s - a).min(b - s))
            })
            .collect()
    }

    /// The union of `𝒢_n` as a closed set.
    pub fn g_family_set(&self, n: usize) -> Result<ClosedSet> {
        if n == 0 || n > self.depth() {
            return Err(Error::InvalidParameter(format!(
                "family {n} outside 1..={}",
                self.depth()
            )));
        }
        Ok(ClosedSet::from_intervals(
            self.g_families[n - 1].iter().copied(),
        ))
    }

    /// Deepest `n` whose `𝒢_n` members are still distinct, disjoint and of
    /// positive width in floating point.
    pub fn resolved_depth(&self) -> usize {
        self.g_families
            .iter()
            .take_while(|fam| {
                fam.iter().all(|iv| iv.hi > iv.lo) && fam.windows(2).all(|p| p[0].hi < p[1].lo)
            })
            .count()
    }

    /// Derived constants of every level, for reproducibility.
    pub fn metadata(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .zip(&self.thetas)
            .map(|(lv, th)| {
                serde_json::json!({
                    "n": lv.n,
                    "alpha": lv.alpha,
                    "q": lv.q,
                    "b": lv.spiral.b,
                    "k": lv.spiral.k,
                    "beta": lv.spiral.beta,
                    "s0": lv.spiral.s0,
                    "s1": lv.spiral.s1,
                    "x_n": lv.x_n,
                    "L_n": lv.big_l,
                    "p_n": lv.p_n,
                    "a_n": lv.a_n,
                    "theta_n": th,
                })
            })
            .collect();
        serde_json::json!({
            "type": "hat",
            "depth": self.depth(),
            "levels": levels,
            "total_length": self.total_length,
            "tail_bound": self.tail_bound,
            "resolved_depth": self.resolved_depth(),
        })
    }
}
