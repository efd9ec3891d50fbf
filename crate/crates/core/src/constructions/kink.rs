use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::norm::{NormSpec, Vector};

/// Weights and kink locations of the ℓ² curve `f = (t_n·f_n)_n`, truncated
/// to `n_max` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkExampleSpec {
    pub weights: Vec<f64>,
    pub kinks: Vec<f64>,
    /// `(Σ_{n > n_max} t_n²)^{1/2}` of the untruncated sequence the weights
    /// were taken from.
    pub tail: f64,
}

/// The `n`-th term (1-based) of the base-2 van der Corput sequence:
/// 1/2, 1/4, 3/4, 1/8, 5/8, …
pub fn van_der_corput(n: u64) -> f64 {
    let (mut n, mut denom, mut x) = (n, 1.0, 0.0);
    while n > 0 {
        denom *= 2.0;
        x += (n & 1) as f64 / denom;
        n >>= 1;
    }
    x
}

impl KinkExampleSpec {
    /// `t_n² ∝ 2^{−n}` rescaled so the truncated weights have unit square
    /// sum, kinks at the van der Corput points.
    pub fn dyadic(n_max: usize) -> Self {
        let total = 1.0 - 2f64.powi(-(n_max as i32));
        KinkExampleSpec {
            weights: (1..=n_max)
                .map(|n| (2f64.powi(-(n as i32)) / total).sqrt())
                .collect(),
            kinks: (1..=n_max as u64).map(van_der_corput).collect(),
            tail: 2f64.powf(-(n_max as f64) / 2.0),
        }
    }

    pub fn n_max(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.len() != self.kinks.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} kinks",
                self.weights.len(),
                self.kinks.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be nonnegative".into(),
            ));
        }
        let sum: f64 = self.weights.iter().map(|w| w * w).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "squared weights sum to {sum}, not 1"
            )));
        }
        let mut sorted = self.kinks.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.iter().any(|q| !(*q > 0.0 && *q < 1.0)) || sorted.windows(2).any(|w| w[0] == w[1])
        {
            return Err(Error::InvalidParameter(
                "kinks must be distinct points of (0, 1)".into(),
            ));
        }
        if !(self.tail >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "negative tail {}",
                self.tail
            )));
        }
        Ok(())
    }
}

/// `C_m = ((2 + √2)/4·t_m² + Σ_{n≠m} t_n²)^{1/2}` with 1-based `m`.
pub fn c_m_bound(m: usize, weights: &[f64]) -> Result<f64> {
    if m == 0 || m > weights.len() {
        return Err(Error::InvalidParameter(format!(
            "m = {m} outside 1..={}",
            weights.len()
        )));
    }
    let c = (2.0 + 2f64.sqrt()) / 4.0;
    Ok(weights
        .iter()
        .enumerate()
        .map(|(i, w)| if i + 1 == m { c * w * w } else { w * w })
        .sum::<f64>()
        .sqrt())
}

/// The curve on `[0, 1]` whose `n`-th coordinate pair is `t_n·f_n(t)`, where
/// `f_n` runs along the x-axis until `q_n` and then turns by 45°.
pub fn build_l2_kink_example(spec: &KinkExampleSpec) -> Result<Curve> {
    spec.validate()?;
    let n = spec.n_max();
    let weights = spec.weights.clone();
    let kinks = spec.kinks.clone();
    let eval = move |t: f64| {
        let mut v = Vec::with_capacity(2 * n);
        for (w, q) in weights.iter().zip(&kinks) {
            if t <= *q {
                v.extend([w * t, 0.0]);
            } else {
                let d = (t - q) * FRAC_1_SQRT_2;
                v.extend([w * (q + d), w * d]);
            }
        }
        Vector::from(v)
    };
    let c = Curve::new(
        crate::curve::Interval::new(0.0, 1.0)?,
        NormSpec::L2Truncated { dim: 2 * n },
        eval,
    );
    Ok(c.with_breakpoints(spec.kinks.clone())?
        .with_lipschitz(1.0)
        .with_tail_bound(spec.tail)
        .with_label(format!("kink(n_max={n})")))
}
