use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derived_numbers, md_defect, metric_derivative_of, Extended, Ladder};
use crate::curve::Curve;
use crate::error::Result;

/// Pointwise conditions whose exceptional sets are small (countable or
/// σ-porous) for every curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    /// `md_+(f, x)` and `md_-(f, x)` both exist and differ.
    UnilateralMismatch,
    /// `mD_+(f, x) > mD^-(f, x)` or `mD_-(f, x) > mD^+(f, x)`.
    Angular,
    /// `mD^+(f, x) ≠ mD^-(f, x)`.
    UpperMismatch,
    /// `mD_+(f, x) ≠ mD_-(f, x)`.
    LowerMismatch,
    /// `md(f, x)` exists but the defect stays large.
    MdExistsNotMdiff,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::UnilateralMismatch,
        Predicate::Angular,
        Predicate::UpperMismatch,
        Predicate::LowerMismatch,
        Predicate::MdExistsNotMdiff,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub tol: f64,
    pub defect_window: f64,
    pub pair_samples: usize,
    /// Defect above which a point with a metric derivative counts as not
    /// metrically differentiable.
    pub defect_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tol: 1e-3,
            defect_window: 1e-3,
            pair_samples: 4,
            defect_threshold: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlaggedPoint {
    pub x: f64,
    pub predicate: Predicate,
    /// By how much the defining inequality holds; `+∞` when a derived
    /// number blew up.
    pub margin: Extended,
    pub witness: Option<(f64, f64)>,
}

fn gap(a: Extended, b: Extended) -> Extended {
    match (a, b) {
        (Extended::Finite(u), Extended::Finite(v)) => Extended::Finite((u - v).abs()),
        (Extended::Infinite, Extended::Infinite) => Extended::Finite(0.0),
        _ => Extended::Infinite,
    }
}

fn excess(a: Extended, b: Extended) -> Extended {
    match (a, b) {
        (Extended::Finite(u), Extended::Finite(v)) => Extended::Finite(u - v),
        (Extended::Infinite, Extended::Finite(_)) => Extended::Infinite,
        _ => Extended::Finite(f64::NEG_INFINITY),
    }
}

fn check_point(
    curve: &Curve,
    x: f64,
    ladder: &Ladder,
    predicate: Predicate,
    opts: &ScanOptions,
) -> Result<Option<FlaggedPoint>> {
    let est = derived_numbers(curve, x, ladder)?;
    let mut witness = None;
    let margin = match predicate {
        Predicate::UnilateralMismatch => {
            match (
                est.one_sided(true, opts.tol),
                est.one_sided(false, opts.tol),
            ) {
                (Some(p), Some(m)) => Some(Extended::Finite((p - m).abs())),
                _ => None,
            }
        }
        Predicate::Angular => match (
            est.plus_lower(),
            est.plus_upper(),
            est.minus_lower(),
            est.minus_upper(),
        ) {
            (Some(pl), Some(pu), Some(ml), Some(mu)) => {
                let a = excess(pl, mu);
                let b = excess(ml, pu);
                Some(if a > b { a } else { b })
            }
            _ => None,
        },
        Predicate::UpperMismatch => match (est.plus_upper(), est.minus_upper()) {
            (Some(p), Some(m)) => Some(gap(p, m)),
            _ => None,
        },
        Predicate::LowerMismatch => match (est.plus_lower(), est.minus_lower()) {
            (Some(p), Some(m)) => Some(gap(p, m)),
            _ => None,
        },
        Predicate::MdExistsNotMdiff => match metric_derivative_of(&est, opts.tol) {
            Some(md) => {
                let d = md_defect(curve, x, opts.defect_window, opts.pair_samples, md)?;
                witness = Some(d.witness);
                Some(Extended::Finite(d.defect - opts.defect_threshold))
            }
            None => None,
        },
    };
    let threshold = match predicate {
        Predicate::MdExistsNotMdiff => 0.0,
        _ => opts.tol,
    };
    Ok(margin
        .filter(|m| *m > Extended::Finite(threshold))
        .map(|margin| FlaggedPoint {
            x,
            predicate,
            margin,
            witness,
        }))
}

/// Grid points where `predicate` holds with margin above the tolerance.
/// Points are examined in parallel; the output follows the grid order.
pub fn scan_exceptional_points(
    curve: &Curve,
    grid: &[f64],
    ladder: &Ladder,
    predicate: Predicate,
    opts: &ScanOptions,
) -> Result<Vec<FlaggedPoint>> {
    let found: Vec<Option<FlaggedPoint>> = grid
        .par_iter()
        .map(|&x| check_point(curve, x, ladder, predicate, opts))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    fn slopes_1212() -> Curve {
        Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| {
            let f = if t <= 0.25 {
                t
            } else if t <= 0.5 {
                0.25 + 2.0 * (t - 0.25)
            } else if t <= 0.75 {
                0.75 + (t - 0.5)
            } else {
                1.0 + 2.0 * (t - 0.75)
            };
            (f, 0.0)
        })
        .unwrap()
    }

    #[test]
    fn linear_curve_has_no_exceptional_points() {
        let c = Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (2.0 * t, -t)).unwrap();
        let l = Ladder::default_for(c.domain());
        for p in Predicate::ALL {
            let found = scan_exceptional_points(&c, &grid(200), &l, p, &ScanOptions::default());
            assert!(found.unwrap().is_empty(), "{p:?}");
        }
    }

    #[test]
    fn kinks_of_piecewise_linear_curve() {
        let c = slopes_1212();
        let l = Ladder::default_for(c.domain());
        let found = scan_exceptional_points(
            &c,
            &grid(1000),
            &l,
            Predicate::UnilateralMismatch,
            &ScanOptions::default(),
        )
        .unwrap();
        let xs: Vec<f64> = found.iter().map(|f| f.x).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75]);
        for f in &found {
            assert!((f.margin.to_f64() - 1.0).abs() < 1e-6);
        }
        let upper = scan_exceptional_points(
            &c,
            &grid(1000),
            &l,
            Predicate::UpperMismatch,
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(upper.len(), 3);
        let angular = scan_exceptional_points(
            &c,
            &grid(1000),
            &l,
            Predicate::Angular,
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(angular.len(), 3);
    }

    #[test]
    fn abs_is_flagged_as_md_without_differentiability() {
        let c = Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, |t| (t.abs(), 0.0)).unwrap();
        let l = Ladder::default_for(c.domain());
        let g: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 / 20.0).collect();
        let found = scan_exceptional_points(
            &c,
            &g,
            &l,
            Predicate::MdExistsNotMdiff,
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].x, 0.0);
        assert!(found[0].margin > Extended::Finite(0.8));
    }

    #[test]
    fn infinite_margins_for_jumps() {
        let c = Curve::planar(-1.0, 1.0, NormSpec::Euclidean2d, |t| {
            (if t < 0.0 { 0.0 } else { 1.0 }, 0.0)
        })
        .unwrap();
        let l = Ladder::default_for(c.domain());
        let found = scan_exceptional_points(
            &c,
            &[0.0, 0.5],
            &l,
            Predicate::UpperMismatch,
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].margin, Extended::Infinite);
    }

    #[test]
    fn scans_are_deterministic() {
        let c = slopes_1212();
        let l = Ladder::default_for(c.domain());
        let run = || {
            scan_exceptional_points(
                &c,
                &grid(997),
                &l,
                Predicate::Angular,
                &ScanOptions::default(),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }
}
