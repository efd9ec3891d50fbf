//! Closed subsets of the line given as finite unions of closed intervals
//! (points being degenerate intervals).

use serde::{Deserialize, Serialize};

use crate::curve::Interval;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSet {
    /// Sorted, pairwise disjoint closed intervals.
    components: Vec<Interval>,
}

impl ClosedSet {
    pub fn empty() -> Self {
        ClosedSet {
            components: Vec::new(),
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = f64>) -> Self {
        ClosedSet::from_intervals(points.into_iter().map(|p| Interval { lo: p, hi: p }))
    }

    /// Union of the given closed intervals; overlapping or touching members
    /// are merged.
    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            match out.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => out.push(i),
            }
        }
        ClosedSet { components: out }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.components.partition_point(|c| c.hi < x);
        self.components.get(i).is_some_and(|c| c.lo <= x)
    }

    /// The first component of positive length, if any.
    pub fn interior_witness(&self) -> Option<Interval> {
        self.components.iter().copied().find(|c| c.hi > c.lo)
    }

    pub fn measure(&self) -> f64 {
        self.components.iter().map(Interval::len).sum()
    }

    /// Distance from `x` to the set (`+∞` for the empty set).
    pub fn dist(&self, x: f64) -> f64 {
        let i = self.components.partition_point(|c| c.hi < x);
        let mut d = f64::INFINITY;
        if let Some(c) = self.components.get(i) {
            d = d.min((c.lo - x).max(0.0));
        }
        if i > 0 {
            d = d.min(x - self.components[i - 1].hi);
        }
        d
    }

    /// Open components of `(lo, hi) \ M`.
    pub fn gaps_within(&self, lo: f64, hi: f64) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for c in &self.components {
            if c.hi < lo {
                continue;
            }
            if c.lo > hi {
                break;
            }
            if c.lo > cursor {
                out.push(Interval {
                    lo: cursor,
                    hi: c.lo.min(hi),
                });
            }
            cursor = cursor.max(c.hi);
        }
        if cursor < hi {
            out.push(Interval { lo: cursor, hi });
        }
        out
    }

    /// `{2x − m : m ∈ M}`.
    pub fn reflect(&self, x: f64) -> ClosedSet {
        ClosedSet::from_intervals(self.components.iter().map(|c| Interval {
            lo: 2.0 * x - c.hi,
            hi: 2.0 * x - c.lo,
        }))
    }

    pub fn union(&self, other: &ClosedSet) -> ClosedSet {
        ClosedSet::from_intervals(self.components.iter().chain(&other.components).copied())
    }

    /// Checks that the open interval `(lo, hi)` avoids the set.
    pub fn misses_open(&self, lo: f64, hi: f64) -> bool {
        self.components.iter().all(|c| c.hi <= lo || c.lo >= hi)
    }

    pub fn require_null(&self) -> Result<()> {
        match self.interior_witness() {
            Some(c) => Err(Error::NonemptyInterior { lo: c.lo, hi: c.hi }),
            None => Ok(()),
        }
    }
}

/// Endpoints of the `2^depth` closed intervals of the depth-`depth`
/// middle-thirds construction on `[0, 1]`.
pub fn middle_thirds_endpoints(depth: u32) -> Vec<f64> {
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 0..depth {
        intervals = intervals
            .into_iter()
            .flat_map(|(a, b)| {
                let w = (b - a) / 3.0;
                [(a, a + w), (b - w, b)]
            })
            .collect();
    }
    intervals.into_iter().flat_map(|(a, b)| [a, b]).collect()
}

/// The closed intervals of the depth-`depth` middle-thirds construction.
pub fn middle_thirds_intervals(depth: u32) -> Vec<Interval> {
    middle_thirds_endpoints(depth)
        .chunks(2)
        .map(|c| Interval { lo: c[0], hi: c[1] })
        .collect()
}
