//! Curves `[a, b] → (X, ‖·‖)` and the machinery built on their variation.

mod homeo;
mod reparam;
mod variation;
mod zahorski;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{NormSpec, Vector};

pub use homeo::{HomeoRow, HomeoTable, Homeomorphism};
pub use reparam::{
    arc_length_reparameterize, compose, constancy_intervals, phi_reparam, ArcLengthMap,
    ReparamPlan, DEFAULT_CONSTANCY_TOL,
};
pub use variation::{
    variation, variation_profile, ProfileRow, VariationEstimate, VariationProfile,
};
pub use zahorski::zahorski_homeomorphism;

/// A closed parameter interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

type Evaluator = dyn Fn(f64) -> Vector + Send + Sync;

/// A path `f: [a, b] → X` together with whatever structural metadata its
/// builder knows.
#[derive(Clone)]
pub struct Curve {
    domain: Interval,
    space: NormSpec,
    eval: Arc<Evaluator>,
    /// Interior points where the curve may fail to be smooth.
    pub breakpoints: Vec<f64>,
    pub lipschitz_bound: Option<f64>,
    /// Norm of the discarded tail for curves living in a truncated sequence
    /// space.
    pub tail_bound: Option<f64>,
    pub label: String,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("space", &self.space)
            .field("breakpoints", &self.breakpoints.len())
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("tail_bound", &self.tail_bound)
            .finish()
    }
}

impl Curve {
    pub fn new<F>(domain: Interval, space: NormSpec, eval: F) -> Self
    where
        F: Fn(f64) -> Vector + Send + Sync + 'static,
    {
        Curve {
            domain,
            space,
            eval: Arc::new(eval),
            breakpoints: Vec::new(),
            lipschitz_bound: None,
            tail_bound: None,
            label: String::new(),
        }
    }

    /// A planar curve given by its two coordinate functions.
    pub fn planar<F>(a: f64, b: f64, space: NormSpec, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        if !space.is_planar() {
            return Err(Error::InvalidParameter(
                "planar curve needs a planar norm".into(),
            ));
        }
        Ok(Curve::new(Interval::new(a, b)?, space, move |t| {
            let (x, y) = f(t);
            Vector::planar(x, y)
        }))
    }

    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Result<Self> {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        if let Some(&bad) = breakpoints
            .iter()
            .find(|&&t| !(self.domain.lo < t && t < self.domain.hi))
        {
            return Err(Error::OutsideDomain {
                t: bad,
                a: self.domain.lo,
                b: self.domain.hi,
            });
        }
        self.breakpoints = breakpoints;
        Ok(self)
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_bound = Some(l);
        self
    }

    pub fn with_tail_bound(mut self, tail: f64) -> Self {
        self.tail_bound = Some(tail);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn space(&self) -> &NormSpec {
        &self.space
    }

    /// `f(t)`, or an error outside the domain.
    pub fn eval(&self, t: f64) -> Result<Vector> {
        if !self.domain.contains(t) {
            return Err(Error::OutsideDomain {
                t,
                a: self.domain.lo,
                b: self.domain.hi,
            });
        }
        Ok((self.eval)(t))
    }

    /// `f(t)` for a parameter the caller already knows to be in the domain.
    pub fn at(&self, t: f64) -> Vector {
        debug_assert!(
            self.domain.contains(t),
            "{t} outside {} for {}",
            self.domain,
            self.label
        );
        (self.eval)(t)
    }

    /// `‖f(t) − f(s)‖`.
    pub fn chord(&self, s: f64, t: f64) -> f64 {
        self.space.dist(&self.at(t), &self.at(s))
    }

    pub fn dist(&self, u: &Vector, v: &Vector) -> f64 {
        self.space.dist(u, v)
    }

    /// Clamps `t` into the domain.
    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.domain.lo, self.domain.hi)
    }

    /// Largest observed `‖f(t) − f(s)‖ / |t − s|` over the given pairs.
    pub fn max_pair_ratio(&self, pairs: &[(f64, f64)]) -> f64 {
        pairs
            .iter()
            .filter(|(s, t)| s != t)
            .map(|&(s, t)| self.chord(s, t) / (t - s).abs())
            .fold(0.0, f64::max)
    }

    /// The straight segment `t ↦ (t, 0)` on `[a, b]`.
    pub fn segment(a: f64, b: f64) -> Result<Self> {
        Ok(Curve::planar(a, b, NormSpec::Euclidean2d, |t| (t, 0.0))?
            .with_lipschitz(1.0)
            .with_label("segment"))
    }
}
