//! Metric derivatives of curves in normed spaces.
//!
//! The crate has four layers:
//!
//! * [`norm`]: planar norms (Euclidean, ℓ¹, ℓᵖ, polygon gauges) and a
//!   truncated ℓ² with axiom validation;
//! * [`curve`]: curves, variation, arc-length and `φ`-reparameterization,
//!   and the Zahorski smoothing homeomorphism;
//! * [`calculus`]: discretized metric derived numbers, the metric
//!   differentiability defect, regularity ratios, exceptional-point scans
//!   and porosity;
//! * [`constructions`]: the spiral, box, polyline, hat and kink curves.
//!
//! [`spec`], [`profile`] and [`report`] glue these together for the `mdcurves` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod constructions;
pub mod curve;
pub mod error;
pub mod norm;
pub mod profile;
pub mod report;
pub mod sets;
pub mod spec;

pub use curve::{Curve, Interval};
pub use error::{Error, Result};
pub use norm::{NormSpec, Vector};
