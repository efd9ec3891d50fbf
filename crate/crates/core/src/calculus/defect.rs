use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};

/// Sampled size of the residual `‖f(y) − f(z)‖ − md·|y − z|` relative to
/// `|y − x| + |z − x|` in a window around `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectEstimate {
    pub x: f64,
    /// Window half-width actually used.
    pub window: f64,
    /// Set when the requested window had to be clipped to the domain.
    pub clipped: bool,
    pub defect: f64,
    /// Maximum over pairs with `y` and `z` strictly on the same side of `x`.
    pub same_side_defect: f64,
    pub md_used: f64,
    pub witness: (f64, f64),
}

const ADVERSARIAL_LEVELS: i32 = 31;

/// Maximum of `|‖f(y) − f(z)‖ − md·|y − z|| / (|y − x| + |z − x|)` over a
/// `(2·pair_samples + 1)²` lattice in `[x − window, x + window]` and the
/// symmetric pairs `x ∓ window·2^{−j}`, `j = 0..=30`.
pub fn md_defect(
    curve: &Curve,
    x: f64,
    window: f64,
    pair_samples: usize,
    md_value: f64,
) -> Result<DefectEstimate> {
    let d = curve.domain();
    if !d.contains(x) {
        return Err(Error::OutsideDomain {
            t: x,
            a: d.lo,
            b: d.hi,
        });
    }
    if !(window > 0.0) || !md_value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "md_defect needs a positive window and finite md, got {window} and {md_value}"
        )));
    }
    let lo = (x - window).max(d.lo);
    let hi = (x + window).min(d.hi);
    let clipped = lo > x - window || hi < x + window;

    let p = pair_samples.max(1);
    let mut pts: Vec<f64> = (0..=2 * p)
        .map(|i| lo + (hi - lo) * i as f64 / (2 * p) as f64)
        .collect();
    pts.push(x);
    let values: Vec<_> = pts.iter().map(|&t| curve.at(t)).collect();

    let mut est = DefectEstimate {
        x,
        window: (x - lo).max(hi - x),
        clipped,
        defect: 0.0,
        same_side_defect: 0.0,
        md_used: md_value,
        witness: (x, x),
    };
    let mut record = |y: f64, z: f64, chord: f64| {
        let denom = (y - x).abs() + (z - x).abs();
        if denom == 0.0 {
            return;
        }
        let r = (chord - md_value * (y - z).abs()).abs() / denom;
        if r > est.defect {
            est.defect = r;
            est.witness = (y, z);
        }
        if (y - x) * (z - x) > 0.0 {
            est.same_side_defect = est.same_side_defect.max(r);
        }
    };

    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            record(pts[i], pts[j], curve.dist(&values[i], &values[j]));
        }
    }
    let (left, right) = (x - lo, hi - x);
    for j in 0..ADVERSARIAL_LEVELS {
        let f = 2f64.powi(-j);
        let s = left.min(right) * f;
        if s > 0.0 {
            record(x - s, x + s, curve.chord(x - s, x + s));
        }
        for (reach, sign) in [(right, 1.0), (left, -1.0)] {
            let s = reach * f;
            if s > 0.0 {
                let (y, z) = (x + sign * s, x + sign * 0.5 * s);
                record(y, z, curve.chord(y, z));
            }
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    #[test]
    fn segment_has_no_defect() {
        let c = Curve::segment(0.0, 1.0).unwrap();
        let e = md_defect(&c, 0.4, 0.1, 8, 1.0).unwrap();
        assert!(e.defect < 1e-12);
        assert!(!e.clipped);
    }

    #[test]
    fn abs_attains_one_on_symmetric_pairs() {
        let c = Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, |t| (t.abs(), 0.0)).unwrap();
        for w in [1.0, 1e-2, 1e-5] {
            let e = md_defect(&c, 0.0, w, 4, 1.0).unwrap();
            assert!((e.defect - 1.0).abs() < 1e-12);
            let (y, z) = e.witness;
            assert!(y < 0.0 && z > 0.0 && (y + z).abs() <= 1e-12 * w);
            assert!(e.same_side_defect < 1e-12);
        }
    }

    #[test]
    fn parabola_defect_shrinks() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t, 0.5 * t * t)).unwrap();
        let md = 1.25f64.sqrt();
        let mut prev = f64::INFINITY;
        for w in [1e-1, 1e-2, 1e-3] {
            let e = md_defect(&c, 0.5, w, 10, md).unwrap();
            assert!(e.defect < prev);
            prev = e.defect;
        }
        assert!(md_defect(&c, 0.5, 1e-2, 10, md).unwrap().defect < 0.02);
    }

    #[test]
    fn window_is_clipped_at_the_boundary() {
        let c = Curve::segment(0.0, 1.0).unwrap();
        let e = md_defect(&c, 0.05, 0.1, 4, 1.0).unwrap();
        assert!(e.clipped);
        assert!(e.witness.0 >= 0.0 && e.witness.1 >= 0.0);
        assert!(md_defect(&c, 0.5, -1.0, 4, 1.0).is_err());
    }
}
