//! Builders for the explicit example curves: stitched logarithmic spirals,
//! the ℓ¹ box curve, polyline spirals for arbitrary planar norms, the
//! recursive Cantor hat curve and the ℓ² kink curve.

mod boxcurve;
mod hat;
mod kink;
mod polyline;
mod spiral;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::Curve;

pub use boxcurve::{box_height, build_box_curve};
pub use hat::{
    build_cantor_hat_curve, build_hat_level, psi, CantorCode, CantorPoint, HatCurve, HatCurveSpec,
    HatLevel, PieceKind, PsiCheck, SpikeCheck,
};
pub use kink::{build_l2_kink_example, c_m_bound, van_der_corput, KinkExampleSpec};
pub use polyline::{build_polyline_spiral, PolylineSpiral};
pub use spiral::{
    build_spiral_curve, build_spiral_curve_with_b, choose_b, spiral_arc, spiral_ratio_bound_check,
    RatioBoundReport, SpiralCurve, SpiralParams,
};

/// Smallest sampled `‖g(t) − g(s)‖ / |t − s|` over `s ∈ [0, 1]`, `t ≠ s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCertificate {
    pub samples: usize,
    pub min_ratio: f64,
    pub witness: (f64, f64),
}

/// Samples `n` pairs with `s ∈ [0, 1]` and `t` anywhere in the domain: a
/// third very close to `s`, a third uniform, a third at log-uniform
/// distances up to the domain ends.
pub fn sampled_pair_ratio(curve: &Curve, n: usize, seed: u64) -> PairCertificate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = curve.domain();
    let mut cert = PairCertificate {
        samples: 0,
        min_ratio: f64::INFINITY,
        witness: (0.0, 0.0),
    };
    let span = d.len();
    for i in 0..n {
        let s: f64 = match i % 7 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen(),
        };
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let t = match i % 3 {
            0 => s + sign * 10f64.powf(rng.gen_range(-8.0..0.0)),
            1 => rng.gen_range(d.lo..=d.hi),
            _ => s + sign * (span.ln() * rng.gen::<f64>()).exp(),
        };
        let t = curve.clamp(t);
        if t == s {
            continue;
        }
        cert.samples += 1;
        let r = curve.chord(s, t) / (t - s).abs();
        if r < cert.min_ratio {
            cert.min_ratio = r;
            cert.witness = (s, t);
        }
    }
    cert
}
