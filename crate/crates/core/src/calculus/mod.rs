//! Pointwise estimators for metric derived numbers and the metric
//! derivative, plus set-level scanners built on them.

mod defect;
mod derived;
mod ladder;
mod porosity;
mod regularity;
mod scan;

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

pub use defect::{md_defect, DefectEstimate};
pub use derived::{
    derived_numbers, metric_derivative, metric_derivative_of, DerivedNumberEstimate, LadderRow,
    SideEstimate, BLOWUP_RATIO, DEFAULT_MD_TOL,
};
pub use ladder::Ladder;
pub use porosity::{
    symmetric_porosity_lower_bound, upper_porosity_lower_bound, GapRecord, GapStructure,
};
pub use regularity::{regularity_ratio, RatioRow, RegularityProfile};
pub use scan::{scan_exceptional_points, FlaggedPoint, Predicate, ScanOptions};

/// A nonnegative real or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// The value as a float, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}
