use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::norm::NormSpec;

/// Arc-length parameterization of the logarithmic spiral `r = a·e^{bφ}`
/// started at the origin: `|S(t)| = t·|b|/√(b² + 1)`, argument
/// `ln(|S(t)|/a)/b`.
pub fn spiral_arc(a: f64, b: f64, t: f64) -> (f64, f64) {
    spiral_arc_ln(a.ln(), b, t)
}

/// [`spiral_arc`] with `ln a` given directly, for scale factors that do not
/// fit in a float.
fn spiral_arc_ln(ln_a: f64, b: f64, t: f64) -> (f64, f64) {
    let r = t * b.abs() / b.hypot(1.0);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let phi = (r.ln() - ln_a) / b;
    (r * phi.cos(), r * phi.sin())
}

/// Parameters and derived constants of the stitched spiral curve `g_{q,α}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpiralParams {
    pub q: f64,
    pub alpha: f64,
    pub b: f64,
    /// `b/√(b² + 1)`.
    pub k: f64,
    /// `arctan(1/b)`.
    pub beta: f64,
    pub s0: f64,
    pub s1: f64,
    /// `s0 + s1`: beyond `1 + L` (and before `−L`) the curve is a
    /// horizontal ray.
    #[serde(rename = "L")]
    pub l: f64,
    /// `Re f(1 + L)`.
    pub x_far: f64,
    /// `Im f(1 + L)`, the height of the rays.
    pub y_min: f64,
    pub t_star: f64,
}

fn margin_ok(lhs: f64, q: f64) -> bool {
    lhs - q >= 0.01 * (1.0 - q)
}

fn check_q_alpha(q: f64, alpha: f64) -> Result<()> {
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
    Ok(())
}

fn second_condition(b: f64, alpha: f64) -> f64 {
    let k = b / b.hypot(1.0);
    k - k * (1.0 - k) / (b * alpha).exp_m1()
}

/// The smallest multiple of `grid_step` satisfying the four spiral
/// conditions with a 1% margin: both `q`-conditions exceed `q` by
/// `0.01·(1 − q)`, `b ≥ 1.01·tan α` and `b·sin α ≥ 1.01·cos α`.
pub fn choose_b(q: f64, alpha: f64, grid_step: f64) -> Result<f64> {
    check_q_alpha(q, alpha)?;
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid_step must be positive, got {grid_step}"
        )));
    }
    let per_unit = (1.0 / grid_step).round();
    let exact = (per_unit * grid_step - 1.0).abs() < 1e-12;
    for m in 1..=100_000_000u64 {
        let b = if exact {
            m as f64 / per_unit
        } else {
            m as f64 * grid_step
        };
        let k = b / b.hypot(1.0);
        if margin_ok(k, q)
            && margin_ok(second_condition(b, alpha), q)
            && b >= 1.01 * alpha.tan()
            && b * alpha.sin() >= 1.01 * alpha.cos()
        {
            return Ok(b);
        }
    }
    Err(Error::Construction(format!(
        "no admissible b for q = {q}, alpha = {alpha} on grid {grid_step}"
    )))
}

impl SpiralParams {
    /// Validates the four conditions on `b` (strictly, without margin) and
    /// computes the derived constants.
    pub fn new(q: f64, alpha: f64, b: f64) -> Result<Self> {
        check_q_alpha(q, alpha)?;
        let k = b / b.hypot(1.0);
        let failures: Vec<&str> = [
            (k > q, "b/√(b²+1) > q"),
            (-b * alpha.sin() + alpha.cos() < 0.0, "−b·sin α + cos α < 0"),
            (second_condition(b, alpha) > q, "k − k(1−k)/(e^{bα}−1) > q"),
            (alpha.tan() < b, "tan α < b"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect();
        if !failures.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "b = {b} violates {} for q = {q}, alpha = {alpha}",
                failures.join(", ")
            )));
        }
        let beta = (1.0 / b).atan();
        let eba = (b * alpha).exp();
        let s0 = (eba - 1.0) / k;
        let s1 = eba * (b * (alpha - beta)).exp_m1() / k;
        let l = s0 + s1;
        if !l.is_finite() {
            return Err(Error::Construction(format!(
                "spiral constants overflow for b = {b}, alpha = {alpha}"
            )));
        }
        let mut p = SpiralParams {
            q,
            alpha,
            b,
            k,
            beta,
            s0,
            s1,
            l,
            x_far: 0.0,
            y_min: 0.0,
            t_star: f64::NAN,
        };
        let (x_far, y_min) = p.f(1.0 + l);
        p.x_far = x_far;
        p.y_min = y_min;
        p.t_star = p.find_t_star();
        Ok(p)
    }

    /// `f(t)` for `t ≥ 0`: the unit segment, the two spiral arcs, then the
    /// horizontal ray.
    pub fn f(&self, t: f64) -> (f64, f64) {
        let b = self.b;
        let shift = 1.0 / self.k - 1.0;
        if t <= 1.0 {
            (t, 0.0)
        } else if t <= 1.0 + self.s0 {
            spiral_arc_ln(0.0, -b, t + shift)
        } else if t <= 1.0 + self.l {
            spiral_arc_ln(2.0 * b * self.alpha, b, t + shift)
        } else {
            (self.x_far + (t - 1.0 - self.l), self.y_min)
        }
    }

    /// `g(t) = f(t)` for `t ≥ 0` and `1 − conj f(1 − t)` for `t < 0`.
    pub fn g(&self, t: f64) -> (f64, f64) {
        if t >= 0.0 {
            self.f(t)
        } else {
            let (x, y) = self.f(1.0 - t);
            (1.0 - x, y)
        }
    }

    fn arg_from_middle(&self, t: f64) -> f64 {
        let (x, y) = self.g(0.5 + t);
        y.atan2(x - 0.5)
    }

    fn find_t_star(&self) -> f64 {
        let (mut lo, mut hi) = (0.5, 0.5 + self.s0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.arg_from_middle(mid) > -self.alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The argument of `g(1/2 + t_star) − g(1/2)`.
    pub fn t_star_argument(&self) -> f64 {
        self.arg_from_middle(self.t_star)
    }

    /// Parameters where the pieces meet.
    pub fn breakpoints(&self) -> Vec<f64> {
        vec![-self.l, -self.s0, 0.0, 1.0, 1.0 + self.s0, 1.0 + self.l]
    }

    /// `T = 10·(1 + L)`; the curve is built on `[−T, 1 + T]`.
    pub fn reach(&self) -> f64 {
        10.0 * (1.0 + self.l)
    }

    /// The curve `g` on `[−T, 1 + T]` in the Euclidean plane.
    pub fn curve(&self) -> Curve {
        let p = self.clone();
        let t = self.reach();
        Curve::planar(-t, 1.0 + t, NormSpec::Euclidean2d, move |s| p.g(s))
            .expect("euclidean norm is planar")
            .with_breakpoints(self.breakpoints())
            .expect("breakpoints are interior")
            .with_lipschitz(1.0)
            .with_label(format!("spiral(q={}, alpha={})", self.q, self.alpha))
    }
}

#[derive(Clone, Debug)]
pub struct SpiralCurve {
    pub params: SpiralParams,
    pub curve: Curve,
}

/// Builds `g_{q,α}` with `b` from [`choose_b`] on a grid of step 0.1.
pub fn build_spiral_curve(q: f64, alpha: f64) -> Result<SpiralCurve> {
    build_spiral_curve_with_b(q, alpha, None)
}

pub fn build_spiral_curve_with_b(q: f64, alpha: f64, b: Option<f64>) -> Result<SpiralCurve> {
    let b = match b {
        Some(b) => b,
        None => choose_b(q, alpha, 0.1)?,
    };
    let params = SpiralParams::new(q, alpha, b)?;
    let curve = params.curve();
    Ok(SpiralCurve { params, curve })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioBoundReport {
    pub samples: usize,
    pub max_ratio: f64,
    pub argmax: f64,
    /// `1/k`.
    pub bound: f64,
    pub passed: bool,
}

/// Checks `t/|f(t) − f(0)| ≤ 1/k` on a dense grid covering the segment,
/// both arcs and the ray up to `10·(1 + L)`.
pub fn spiral_ratio_bound_check(params: &SpiralParams) -> RatioBoundReport {
    let mut ts: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
    let n = 20_000;
    for i in 1..=n {
        ts.push(1.0 + params.l * i as f64 / n as f64);
    }
    let end = params.reach();
    let (a, b) = ((1.0 + params.l).ln(), end.ln());
    for i in 0..=2000 {
        ts.push((a + (b - a) * i as f64 / 2000.0).exp());
    }
    let mut report = RatioBoundReport {
        samples: ts.len(),
        max_ratio: 0.0,
        argmax: 0.0,
        bound: 1.0 / params.k,
        passed: false,
    };
    for t in ts {
        let (x, y) = params.f(t);
        let r = t / x.hypot(y);
        if r > report.max_ratio {
            report.max_ratio = r;
            report.argmax = t;
        }
    }
    report.passed = report.max_ratio <= report.bound + 1e-9;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::sampled_pair_ratio;
    use crate::curve::variation;
    use proptest::prelude::*;

    /// Arc length of `r = a·e^{bφ}` from the origin to modulus `r0` by
    /// Simpson quadrature of `|dz/dφ| = r·√(1 + b²)` in `φ`.
    fn quadrature_arc(a: f64, b: f64, r0: f64) -> f64 {
        let phi_end = (r0 / a).ln() / b;
        // r → 0 as φ → −∞·sign(b); integrate from where r is negligible.
        let phi_start = phi_end - 40.0 / b.abs() * b.signum();
        let n = 20_000;
        let h = (phi_end - phi_start) / n as f64;
        let speed = |phi: f64| a * (b * phi).exp() * (1.0 + b * b).sqrt();
        let mut acc = speed(phi_start) + speed(phi_end);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * speed(phi_start + h * i as f64);
        }
        (acc * h / 3.0).abs()
    }

    #[test]
    fn spiral_arc_examples() {
        assert_eq!(spiral_arc(1.0, 2.0, 0.0), (0.0, 0.0));
        let (x, y) = spiral_arc(1.0, 1.0, 2f64.sqrt());
        assert!((x.hypot(y) - 1.0).abs() < 1e-15);
        for (a, b, t) in [(1.0, 1.0, 3.0), (0.3, -2.0, 0.7), (5.0, 0.5, 11.0)] {
            let (x1, y1) = spiral_arc(a, b, t);
            let (x2, y2) = spiral_arc(a, b, 2.0 * t);
            assert!((x2.hypot(y2) / x1.hypot(y1) - 2.0).abs() < 1e-14);
            let r = x1.hypot(y1);
            assert!((quadrature_arc(a, b, r) - t).abs() < 1e-8 * t.max(1.0));
        }
    }

    #[test]
    fn choose_b_examples() {
        assert!(SpiralParams::new(0.9, 1.0, 2.5).is_ok());
        assert!(SpiralParams::new(0.9, 1.0, 2.1).is_err());
        let b = choose_b(0.9, 1.0, 0.1).unwrap();
        assert!((b - 2.3).abs() < 1e-12);
        let small_q = choose_b(1e-6, 1.0, 0.01).unwrap();
        assert!((1.55..1.62).contains(&small_q), "{small_q}");
        assert!(choose_b(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn shape_of_g() {
        let s = build_spiral_curve_with_b(0.9, 1.0, Some(2.5)).unwrap();
        let p = &s.params;
        assert_eq!(p.g(0.0), (0.0, 0.0));
        assert_eq!(p.g(1.0), (1.0, 0.0));
        assert!(p.t_star > 0.5 && p.t_star < 0.5 + p.s0);
        assert!((p.t_star_argument() + p.alpha).abs() < 1e-6);
        // The left argument is the mirror image.
        let (x, y) = p.g(0.5 - p.t_star);
        assert!(
            (y.atan2(x - 0.5) - (std::f64::consts::PI + p.alpha - 2.0 * std::f64::consts::PI))
                .abs()
                < 1e-6
        );
        // Rays are horizontal beyond ±L.
        assert_eq!(p.g(1.0 + p.l + 5.0).1, p.y_min);
        assert_eq!(p.g(-p.l - 5.0).1, p.y_min);
        // Joins are continuous.
        for t in p.breakpoints() {
            let (a, b) = (p.g(t - 1e-12), p.g(t + 1e-12));
            assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-10, "{t}");
        }
        let cert = sampled_pair_ratio(&s.curve, 20_000, 7);
        assert!(cert.min_ratio >= 0.9, "{cert:?}");
    }

    #[test]
    fn unit_speed() {
        let s = build_spiral_curve(0.75, std::f64::consts::FRAC_PI_4).unwrap();
        let p = &s.params;
        for (a, b) in [
            (0.5, 1.5),
            (1.0, 1.0 + p.s0),
            (-p.l, 0.0),
            (1.0 + p.s0, 2.0 + p.l),
        ] {
            let v = variation(&s.curve, a, b, 18).unwrap().value;
            assert!((v - (b - a)).abs() < 1e-6 * (b - a).max(1.0), "{a} {b} {v}");
        }
    }

    #[test]
    fn ratio_bound() {
        let p = SpiralParams::new(0.9, 1.0, 2.5).unwrap();
        let r = spiral_ratio_bound_check(&p);
        assert!(r.passed, "{r:?}");
        let (x, y) = p.f(1.0 + p.s0);
        assert!(((1.0 + p.s0) / x.hypot(y) - (1.0 + p.s0) / (p.b * p.alpha).exp()).abs() < 1e-12);
        assert!((1.0 + p.s0) / (p.b * p.alpha).exp() < 1.0 / p.k);
        let t = 10.0 * (1.0 + p.l);
        let (x, y) = p.f(t);
        assert!(t / x.hypot(y) <= 1.0 / p.k);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn chosen_b_is_admissible(q in 0.05f64..0.99, alpha in 0.05f64..1.5) {
            let b = choose_b(q, alpha, 0.1).unwrap();
            prop_assert!(SpiralParams::new(q, alpha, b).is_ok());
            prop_assert!(b <= 0.1 || choose_b(q, alpha, 0.1).unwrap() == b);
        }

        #[test]
        fn modulus_identity(a in 0.1f64..10.0, b in 0.2f64..5.0, t in 1e-3f64..1e3) {
            for bb in [b, -b] {
                let (x, y) = spiral_arc(a, bb, t);
                prop_assert!((x.hypot(y) - t * b / b.hypot(1.0)).abs() <= 1e-12 * t);
            }
        }
    }
}
