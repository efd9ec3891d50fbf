use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Curve;
use crate::error::{Error, Result};

/// Dyadic lower bound for `⋁ₛᵗ f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub value: f64,
    /// Last refinement increment, plus `L·mesh` when the curve carries a
    /// Lipschitz bound.
    pub error_bound: f64,
    pub depth: u32,
    /// Polygonal length at each dyadic level `0..=depth`; nondecreasing.
    pub level_sums: Vec<f64>,
    /// `L·(t − s)` when a Lipschitz bound is known.
    pub certified_upper: Option<f64>,
}

impl VariationEstimate {
    /// Increment between the last two levels.
    pub fn last_increment(&self) -> f64 {
        match self.level_sums.as_slice() {
            [.., a, b] => b - a,
            _ => 0.0,
        }
    }

    /// True unless the increments stall at a size that is not negligible
    /// relative to the value, which is how unbounded variation shows up
    /// under dyadic refinement.
    pub fn looks_convergent(&self) -> bool {
        let s = &self.level_sums;
        if s.len() < 4 {
            return true;
        }
        let n = s.len();
        let inc: Vec<f64> = (n - 3..n).map(|i| s[i] - s[i - 1]).collect();
        let last = inc[2];
        if last <= 1e-3 * s[n - 1].max(f64::MIN_POSITIVE) {
            return true;
        }
        !(inc[1] > 0.75 * inc[0] && inc[2] > 0.75 * inc[1])
    }
}

fn check_range(curve: &Curve, s: f64, t: f64) -> Result<()> {
    if s > t {
        return Err(Error::InvalidInterval { lo: s, hi: t });
    }
    let d = curve.domain();
    for x in [s, t] {
        if !d.contains(x) {
            return Err(Error::OutsideDomain {
                t: x,
                a: d.lo,
                b: d.hi,
            });
        }
    }
    Ok(())
}

/// Sum of `‖f(xᵢ₊₁) − f(xᵢ)‖` over dyadic partitions of `[s, t]` with up to
/// `2^depth` pieces. The sequence of sums is nondecreasing in the level, so
/// the value is a lower bound for the true variation.
pub fn variation(curve: &Curve, s: f64, t: f64, depth: u32) -> Result<VariationEstimate> {
    check_range(curve, s, t)?;
    if depth > 26 {
        return Err(Error::InvalidParameter(format!(
            "variation depth {depth} exceeds 26"
        )));
    }
    let certified_upper = curve.lipschitz_bound.map(|l| l * (t - s));
    if s == t {
        return Ok(VariationEstimate {
            value: 0.0,
            error_bound: 0.0,
            depth,
            level_sums: vec![0.0; depth as usize + 1],
            certified_upper,
        });
    }
    let n = 1usize << depth;
    let h = (t - s) / n as f64;
    let pts: Vec<_> = (0..=n)
        .map(|i| {
            let x = if i == n { t } else { s + h * i as f64 };
            curve.at(x)
        })
        .collect();
    let level_sums: Vec<f64> = (0..=depth)
        .map(|k| {
            let stride = 1usize << (depth - k);
            (0..(n / stride))
                .map(|i| curve.dist(&pts[(i + 1) * stride], &pts[i * stride]))
                .sum()
        })
        .collect();
    // Rounding can make a refined sum a hair smaller than a coarser one.
    let mut monotone = level_sums;
    for i in 1..monotone.len() {
        monotone[i] = monotone[i].max(monotone[i - 1]);
    }
    let value = *monotone.last().unwrap();
    let inc = match monotone.as_slice() {
        [.., a, b] => b - a,
        _ => value,
    };
    let error_bound = inc + curve.lipschitz_bound.map_or(0.0, |l| l * h);
    Ok(VariationEstimate {
        value,
        error_bound,
        depth,
        level_sums: monotone,
        certified_upper,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub v_f: f64,
    pub phi: Option<f64>,
}

/// Samples of `v_f(x) = ⋁ₐˣ f` on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub refinement_depth: u32,
    pub error_bound: f64,
    /// Per-cell variation estimates (`values` are their prefix sums).
    #[serde(skip)]
    pub cells: Vec<VariationEstimate>,
}

impl VariationProfile {
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    /// `v_f` at an arbitrary parameter, by linear interpolation in the
    /// grid.
    pub fn interpolate(&self, t: f64) -> f64 {
        let g = &self.grid;
        if t <= g[0] {
            return self.values[0];
        }
        if t >= *g.last().unwrap() {
            return self.total();
        }
        let i = g.partition_point(|&x| x <= t) - 1;
        let w = (t - g[i]) / (g[i + 1] - g[i]);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    pub fn rows(&self) -> Vec<ProfileRow> {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&t, &v_f)| ProfileRow { t, v_f, phi: None })
            .collect()
    }

    /// `values[j] − values[i]`, the profile's estimate of `⋁ f` over
    /// `[grid[i], grid[j]]`.
    pub fn between(&self, i: usize, j: usize) -> f64 {
        self.values[j] - self.values[i]
    }
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = n - 1;
    (0..n)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last as f64
            }
        })
        .collect()
}

/// `v_f` on a uniform grid of `grid_size` points, each cell refined `depth`
/// dyadic levels. The values are prefix sums of the cell estimates, so the
/// profile is nondecreasing and exactly additive over grid cells.
pub fn variation_profile(curve: &Curve, grid_size: usize, depth: u32) -> Result<VariationProfile> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 2, got {grid_size}"
        )));
    }
    let d = curve.domain();
    let grid = uniform_grid(d.lo, d.hi, grid_size);
    let cells: Vec<VariationEstimate> = grid
        .par_windows(2)
        .map(|w| variation(curve, w[0], w[1], depth))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(grid_size);
    let mut acc = 0.0;
    values.push(0.0);
    for c in &cells {
        acc += c.value;
        values.push(acc);
    }
    let error_bound = cells.iter().map(|c| c.error_bound).sum();
    Ok(VariationProfile {
        grid,
        values,
        refinement_depth: depth,
        error_bound,
        cells,
    })
}
