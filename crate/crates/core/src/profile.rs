//! Pointwise profiles of a curve over a grid: the four derived numbers, the
//! metric derivative, its defect and the smallest bilateral chord ratio.

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{
    derived_numbers, md_defect, metric_derivative_of, regularity_ratio, Extended, Ladder,
    DEFAULT_MD_TOL,
};
use crate::curve::Curve;
use crate::error::{Error, Result};

/// `n` equally spaced points from `a` to `b` inclusive, written `a:b:n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a <= b) || n == 0 || (n == 1 && a != b) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite a <= b and n >= 1 (n = 1 only when a = b), got {a}:{b}:{n}"
            )));
        }
        Ok(Grid { a, b, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| match i {
                0 => self.a,
                i if i == self.n - 1 => self.b,
                i => self.a + (self.b - self.a) * i as f64 / last,
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("expected a:b:n, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a = parts[0].trim().parse().map_err(|_| bad())?;
        let b = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(a, b, n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub x: f64,
    pub plus_upper: Option<Extended>,
    pub plus_lower: Option<Extended>,
    pub minus_upper: Option<Extended>,
    pub minus_lower: Option<Extended>,
    pub md: Option<f64>,
    /// Defect of `md` on the window `[x − t0, x + t0]`; absent without `md`.
    pub defect: Option<f64>,
    /// Absent at the domain ends.
    pub bilateral_ratio_min: Option<f64>,
}

impl ProfileRow {
    pub fn md_exists(&self) -> bool {
        self.md.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileOptions {
    pub tol: f64,
    pub defect_pairs: usize,
    pub ratio_depth: u32,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            tol: DEFAULT_MD_TOL,
            defect_pairs: 16,
            ratio_depth: 10,
        }
    }
}

/// Profiles `curve` at every grid point, in parallel, in grid order.
pub fn profile(
    curve: &Curve,
    grid: &[f64],
    ladder: &Ladder,
    opts: &ProfileOptions,
) -> Result<Vec<ProfileRow>> {
    grid.par_iter()
        .map(|&x| profile_point(curve, x, ladder, opts))
        .collect()
}

pub fn profile_point(
    curve: &Curve,
    x: f64,
    ladder: &Ladder,
    opts: &ProfileOptions,
) -> Result<ProfileRow> {
    let est = derived_numbers(curve, x, ladder)?;
    let md = metric_derivative_of(&est, opts.tol);
    let defect = match md {
        Some(m) => Some(md_defect(curve, x, ladder.t0, opts.defect_pairs, m)?.defect),
        None => None,
    };
    let d = curve.domain();
    let bilateral_ratio_min = if x > d.lo && x < d.hi {
        Some(regularity_ratio(curve, x, ladder.t0, opts.ratio_depth, true)?.min)
    } else {
        None
    };
    Ok(ProfileRow {
        x,
        plus_upper: est.plus_upper(),
        plus_lower: est.plus_lower(),
        minus_upper: est.minus_upper(),
        minus_lower: est.minus_lower(),
        md,
        defect,
        bilateral_ratio_min,
    })
}

pub const CSV_HEADER: &str = "x,mDpu,mDpl,mDmu,mDml,md,md_exists,defect,bilateral_ratio_min";

/// A float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn cell_ext(v: Option<Extended>) -> String {
    v.map(|e| format_f64(e.to_f64())).unwrap_or_default()
}

fn cell(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

/// CSV with a header row; absent values are empty cells and `+∞` is `inf`.
pub fn to_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            format_f64(r.x),
            cell_ext(r.plus_upper),
            cell_ext(r.plus_lower),
            cell_ext(r.minus_upper),
            cell_ext(r.minus_lower),
            cell(r.md),
            r.md_exists().to_string(),
            cell(r.defect),
            cell(r.bilateral_ratio_min),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!("2:2:1".parse::<Grid>().unwrap().points(), vec![2.0]);
        for bad in ["0:1", "1:0:3", "0:1:0", "0:1:1", "a:1:2"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000e0");
        let back: f64 = format_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn segment_profile() {
        let c = Curve::segment(0.0, 1.0).unwrap();
        let grid = Grid::new(0.0, 1.0, 11).unwrap().points();
        let rows = profile(
            &c,
            &grid,
            &Ladder::default_for(c.domain()),
            &Default::default(),
        )
        .unwrap();
        for r in &rows {
            assert!((r.md.unwrap() - 1.0).abs() < 1e-6);
            assert!(r.defect.unwrap() < 1e-9);
        }
        assert!(rows[0].minus_upper.is_none() && rows[0].bilateral_ratio_min.is_none());
        assert!((rows[5].bilateral_ratio_min.unwrap() - 1.0).abs() < 1e-9);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 12);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.0000000000000000e0,"));
    }

    #[test]
    fn abs_at_zero_has_unit_defect() {
        let c = Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, |t| (t.abs(), 0.0)).unwrap();
        let r = profile_point(
            &c,
            0.0,
            &Ladder::default_for(c.domain()),
            &Default::default(),
        )
        .unwrap();
        assert!((r.md.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.defect.unwrap() - 1.0).abs() < 1e-9);
        assert!(r.bilateral_ratio_min.unwrap() < 1e-9);
    }

    #[test]
    fn cube_root_blows_up() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t.cbrt(), 0.0)).unwrap();
        let l = Ladder::new(1.0, 0.5, 40).unwrap();
        let r = profile_point(&c, 0.0, &l, &Default::default()).unwrap();
        assert_eq!(r.plus_upper, Some(Extended::Infinite));
        assert!(r.md.is_none() && r.defect.is_none());
        assert!(to_csv(&[r]).contains(",inf,"));
    }
}
