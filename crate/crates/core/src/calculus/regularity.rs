use serde::Serialize;

use crate::curve::{variation, Curve};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub y: f64,
    pub z: f64,
    pub chord: f64,
    pub variation: f64,
    pub ratio: f64,
}

/// Chord-to-variation ratios `‖f(z) − f(y)‖ / ⋁_y^z f` near `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityProfile {
    pub x: f64,
    pub bilateral: bool,
    pub rows: Vec<RatioRow>,
    pub min: f64,
    pub max: f64,
}

const UNILATERAL_SCALES: i32 = 12;
const BILATERAL_SCALES: i32 = 8;

/// Unilateral mode: pairs `(x, x + window·2^{−j})` (or to the left at the
/// right endpoint). Bilateral mode: pairs `(x − window·2^{−i}, x +
/// window·2^{−j})`. Variation is computed with `2^depth` pieces.
pub fn regularity_ratio(
    curve: &Curve,
    x: f64,
    window: f64,
    depth: u32,
    bilateral: bool,
) -> Result<RegularityProfile> {
    let d = curve.domain();
    if !d.contains(x) {
        return Err(Error::OutsideDomain {
            t: x,
            a: d.lo,
            b: d.hi,
        });
    }
    if !(window > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be positive, got {window}"
        )));
    }
    let (left, right) = ((x - d.lo).min(window), (d.hi - x).min(window));
    let mut pairs = Vec::new();
    if bilateral {
        if left <= 0.0 || right <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bilateral ratio needs room on both sides of {x}"
            )));
        }
        for i in 0..BILATERAL_SCALES {
            for j in 0..BILATERAL_SCALES {
                pairs.push((x - left * 2f64.powi(-i), x + right * 2f64.powi(-j)));
            }
        }
    } else {
        for j in 0..UNILATERAL_SCALES {
            let f = 2f64.powi(-j);
            if right > 0.0 {
                pairs.push((x, x + right * f));
            } else {
                pairs.push((x - left * f, x));
            }
        }
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (y, z) in pairs {
        let v = variation(curve, y, z, depth)?.value;
        if v <= 0.0 {
            return Err(Error::ZeroVariation { lo: y, hi: z });
        }
        let chord = curve.chord(y, z);
        rows.push(RatioRow {
            y,
            z,
            chord,
            variation: v,
            ratio: chord / v,
        });
    }
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max = rows
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RegularityProfile {
        x,
        bilateral,
        rows,
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    #[test]
    fn segment_ratio_is_one() {
        let c = Curve::segment(0.0, 1.0).unwrap();
        for bilateral in [false, true] {
            let p = regularity_ratio(&c, 0.3, 0.2, 8, bilateral).unwrap();
            assert!((p.min - 1.0).abs() < 1e-12 && (p.max - 1.0).abs() < 1e-12);
        }
        let end = regularity_ratio(&c, 1.0, 0.2, 8, false).unwrap();
        assert!(end.rows.iter().all(|r| r.z == 1.0));
    }

    #[test]
    fn abs_collapses_on_symmetric_pairs() {
        let c = Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, |t| (t.abs(), 0.0)).unwrap();
        let p = regularity_ratio(&c, 0.0, 0.5, 10, true).unwrap();
        assert!(p.min.abs() < 1e-12);
        let u = regularity_ratio(&c, 0.0, 0.5, 10, false).unwrap();
        assert!((u.min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_piece_is_an_error() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t.min(0.5), 0.0)).unwrap();
        assert!(matches!(
            regularity_ratio(&c, 0.75, 0.1, 6, false),
            Err(Error::ZeroVariation { .. })
        ));
        assert!(regularity_ratio(&c, 0.0, 0.1, 6, true).is_err());
    }

    #[test]
    fn circle_is_regular() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t.cos(), t.sin())).unwrap();
        let p = regularity_ratio(&c, 0.5, 0.1, 12, true).unwrap();
        // chord/arc = sin(s/2)/(s/2) ≥ 1 − s²/24 for arc length s ≤ 0.2
        assert!(p.min >= 1.0 - 0.04 / 24.0 - 1e-9 && p.max <= 1.0 + 1e-9);
    }
}
