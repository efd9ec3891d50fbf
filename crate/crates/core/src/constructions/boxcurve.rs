use std::f64::consts::FRAC_PI_2;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::norm::NormSpec;

/// `h = tan(α)/2`, the depth of the box.
pub fn box_height(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, π/2), got {alpha}"
        )));
    }
    Ok(0.5 * alpha.tan())
}

/// The five-piece box curve in `(ℝ², ‖·‖₁)`: the unit segment, two
/// vertical drops of height `h` at its ends, and two horizontal rays at
/// height `−h`. It has unit ℓ¹ speed and every chord has ℓ¹ length equal
/// to its parameter distance.
pub fn build_box_curve(alpha: f64) -> Result<Curve> {
    let h = box_height(alpha)?;
    let reach = 10.0 * (1.0 + h);
    let g = move |t: f64| {
        if t < -h {
            (t + h, -h)
        } else if t < 0.0 {
            (0.0, t)
        } else if t <= 1.0 {
            (t, 0.0)
        } else if t <= 1.0 + h {
            (1.0, -(t - 1.0))
        } else {
            (t - h, -h)
        }
    };
    Ok(Curve::planar(-reach, 1.0 + reach, NormSpec::L1, g)?
        .with_breakpoints(vec![-h, 0.0, 1.0, 1.0 + h])?
        .with_lipschitz(1.0)
        .with_label(format!("box(alpha={alpha})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::sampled_pair_ratio;

    #[test]
    fn formula_values() {
        let c = build_box_curve(std::f64::consts::FRAC_PI_4).unwrap();
        let p = c.at(1.5);
        assert!((p.x() - 1.0).abs() < 1e-15 && (p.y() + 0.5).abs() < 1e-15);
        let h = box_height(1.0).unwrap();
        let c = build_box_curve(1.0).unwrap();
        let d = c.at(1.0 + h).sub(&c.at(0.5));
        assert!((d.y().atan2(d.x()) + 1.0).abs() < 1e-12);
        assert!(box_height(FRAC_PI_2).is_err());
    }

    #[test]
    fn chords_equal_parameter_distance() {
        for alpha in [0.3, 1.0, 1.5] {
            let c = build_box_curve(alpha).unwrap();
            let cert = sampled_pair_ratio(&c, 20_000, 3);
            assert!((cert.min_ratio - 1.0).abs() < 1e-12, "{cert:?}");
            let d = c.domain();
            let m = c.max_pair_ratio(&[(d.lo, d.hi), (-0.1, 1.2), (0.3, 0.7)]);
            assert!((m - 1.0).abs() < 1e-12);
        }
    }
}
