use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::variation::uniform_grid;
use super::Interval;
use crate::error::{Error, Result};

type Map = dyn Fn(f64) -> f64 + Send + Sync;

/// A strictly increasing map of `domain` onto `range`, with its inverse.
#[derive(Clone)]
pub struct Homeomorphism {
    pub kind: String,
    domain: Interval,
    range: Interval,
    forward: Arc<Map>,
    inverse: Arc<Map>,
    derivative: Option<Arc<Map>>,
}

impl fmt::Debug for Homeomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Homeomorphism")
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// One sampled row `(t, h(t), h'(t))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomeoRow {
    pub t: f64,
    pub h: f64,
    pub dh: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomeoTable {
    pub kind: String,
    pub domain: Interval,
    pub range: Interval,
    pub rows: Vec<HomeoRow>,
}

impl Homeomorphism {
    pub fn from_fns<F, G>(
        kind: impl Into<String>,
        domain: Interval,
        range: Interval,
        forward: F,
        inverse: G,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Homeomorphism {
            kind: kind.into(),
            domain,
            range,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            derivative: None,
        }
    }

    /// A homeomorphism whose inverse is found by bisection on `forward`.
    pub fn from_forward<F>(kind: impl Into<String>, domain: Interval, forward: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let forward: Arc<Map> = Arc::new(forward);
        let range = Interval {
            lo: forward(domain.lo),
            hi: forward(domain.hi),
        };
        let f = forward.clone();
        Homeomorphism {
            kind: kind.into(),
            domain,
            range,
            forward,
            inverse: Arc::new(move |y| invert_monotone(&*f, domain, y)),
            derivative: None,
        }
    }

    pub fn with_derivative<D>(mut self, d: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn identity(domain: Interval) -> Self {
        Homeomorphism::from_fns("identity", domain, domain, |t| t, |t| t).with_derivative(|_| 1.0)
    }

    /// The increasing affine map of `domain` onto `range`.
    pub fn affine(domain: Interval, range: Interval) -> Result<Self> {
        if domain.is_empty() || range.is_empty() {
            return Err(Error::InvalidParameter(
                "affine homeomorphism needs nondegenerate intervals".into(),
            ));
        }
        let slope = range.len() / domain.len();
        Ok(Homeomorphism::from_fns(
            "affine",
            domain,
            range,
            move |t| {
                if t == domain.hi {
                    range.hi
                } else {
                    range.lo + slope * (t - domain.lo)
                }
            },
            move |s| {
                if s == range.hi {
                    domain.hi
                } else {
                    domain.lo + (s - range.lo) / slope
                }
            },
        )
        .with_derivative(move |_| slope))
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn forward(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    pub fn inverse(&self, s: f64) -> f64 {
        (self.inverse)(s)
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Checks monotonicity, the round trip and the endpoints on `n` samples.
    pub fn check(&self, n: usize, tol: f64) -> Result<()> {
        let grid = uniform_grid(self.domain.lo, self.domain.hi, n.max(2));
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if (self.forward(self.domain.lo) - self.range.lo).abs() > tol
            || (self.forward(self.domain.hi) - self.range.hi).abs() > tol
        {
            return bad(format!("{} does not map endpoints to endpoints", self.kind));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &grid {
            let h = self.forward(t);
            if h <= prev {
                return bad(format!("{} is not strictly increasing at {t}", self.kind));
            }
            prev = h;
        }
        for s in uniform_grid(self.range.lo, self.range.hi, n.max(2)) {
            let back = self.forward(self.inverse(s));
            if (back - s).abs() > tol {
                return bad(format!("{}: h(h⁻¹({s})) = {back}", self.kind));
            }
        }
        Ok(())
    }

    pub fn table(&self, n: usize) -> HomeoTable {
        HomeoTable {
            kind: self.kind.clone(),
            domain: self.domain,
            range: self.range,
            rows: uniform_grid(self.domain.lo, self.domain.hi, n.max(2))
                .into_iter()
                .map(|t| HomeoRow {
                    t,
                    h: self.forward(t),
                    dh: self.derivative(t),
                })
                .collect(),
        }
    }
}

/// Solves `f(t) = y` for nondecreasing `f` on `domain` by bisection, to the
/// resolution of the floating-point grid.
pub(crate) fn invert_monotone(f: &dyn Fn(f64) -> f64, domain: Interval, y: f64) -> f64 {
    let (mut lo, mut hi) = (domain.lo, domain.hi);
    if y <= f(lo) {
        return lo;
    }
    if y >= f(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
