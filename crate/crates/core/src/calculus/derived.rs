use serde::Serialize;

use super::{Extended, Ladder};
use crate::curve::Curve;
use crate::error::{Error, Result};

/// Ratio above which a growing sequence of difference quotients is reported
/// as `+∞`.
pub const BLOWUP_RATIO: f64 = 1e6;

pub const DEFAULT_MD_TOL: f64 = 1e-3;

/// Difference quotients `‖f(x ± t) − f(x)‖ / t` at one ladder scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRow {
    pub t: f64,
    pub plus: Option<f64>,
    pub minus: Option<f64>,
}

/// `limsup` and `liminf` of the one-sided quotients on the fine half of the
/// ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideEstimate {
    pub upper: Extended,
    pub lower: Extended,
    /// `|r_last − r_{last−1}|`, the last change of the quotient.
    pub cauchy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedNumberEstimate {
    pub x: f64,
    /// `mD^+` and `mD_+`; absent at the right endpoint.
    pub plus: Option<SideEstimate>,
    /// `mD^-` and `mD_-`; absent at the left endpoint.
    pub minus: Option<SideEstimate>,
    pub table: Vec<LadderRow>,
}

impl DerivedNumberEstimate {
    pub fn plus_upper(&self) -> Option<Extended> {
        self.plus.as_ref().map(|s| s.upper)
    }

    pub fn plus_lower(&self) -> Option<Extended> {
        self.plus.as_ref().map(|s| s.lower)
    }

    pub fn minus_upper(&self) -> Option<Extended> {
        self.minus.as_ref().map(|s| s.upper)
    }

    pub fn minus_lower(&self) -> Option<Extended> {
        self.minus.as_ref().map(|s| s.lower)
    }

    fn sides(&self) -> impl Iterator<Item = &SideEstimate> {
        self.plus.iter().chain(self.minus.iter())
    }

    /// The one-sided metric derivative `md_±` when the upper and lower
    /// estimates on that side agree within `tol`.
    pub fn one_sided(&self, plus: bool, tol: f64) -> Option<f64> {
        let side = if plus {
            self.plus.as_ref()?
        } else {
            self.minus.as_ref()?
        };
        let (u, l) = (side.upper.finite()?, side.lower.finite()?);
        (u - l <= tol && side.cauchy <= tol).then_some(0.5 * (u + l))
    }

    /// Whether some available side blew up.
    pub fn any_infinite(&self) -> bool {
        self.sides().any(|s| !s.upper.is_finite())
    }
}

fn side(rows: &[(f64, f64)]) -> Option<SideEstimate> {
    let ratios: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (&last, _) = ratios.split_last()?;
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let n = ratios.len();
    let growing = n >= 3 && ratios[n - 3] < ratios[n - 2] && ratios[n - 2] < ratios[n - 1];
    let infinite = !last.is_finite() || (last > BLOWUP_RATIO && growing);
    let cauchy = if n >= 2 {
        (ratios[n - 1] - ratios[n - 2]).abs()
    } else {
        0.0
    };
    Some(SideEstimate {
        upper: if infinite {
            Extended::Infinite
        } else {
            Extended::Finite(max)
        },
        lower: if infinite && ratios.windows(2).all(|w| w[0] <= w[1]) {
            Extended::Infinite
        } else {
            Extended::Finite(min)
        },
        cauchy: if infinite { f64::INFINITY } else { cauchy },
    })
}

/// Estimates `mD^±(f, x)` and `mD_±(f, x)` from the difference quotients on
/// `ladder`.
///
/// Every scale is tabulated, but the upper and lower values are taken over
/// the fine half `j ≥ steps/2` only, so that structure at a fixed distance
/// from `x` does not leak into the limits. Scales reaching outside the
/// domain are skipped; a side with no usable fine scale is absent.
pub fn derived_numbers(curve: &Curve, x: f64, ladder: &Ladder) -> Result<DerivedNumberEstimate> {
    ladder.validate()?;
    let d = curve.domain();
    if !d.contains(x) {
        return Err(Error::OutsideDomain {
            t: x,
            a: d.lo,
            b: d.hi,
        });
    }
    ladder.check_resolvable(x)?;
    let fx = curve.at(x);
    let quotient = |t: f64, s: f64| {
        let y = x + s * t;
        d.contains(y).then(|| curve.dist(&curve.at(y), &fx) / t)
    };
    let table: Vec<LadderRow> = ladder
        .scales()
        .into_iter()
        .map(|t| LadderRow {
            t,
            plus: quotient(t, 1.0),
            minus: quotient(t, -1.0),
        })
        .collect();
    let tail = &table[ladder.tail_start()..];
    let collect = |pick: fn(&LadderRow) -> Option<f64>| -> Vec<(f64, f64)> {
        tail.iter()
            .filter_map(|r| pick(r).map(|v| (r.t, v)))
            .collect()
    };
    Ok(DerivedNumberEstimate {
        x,
        plus: side(&collect(|r| r.plus)),
        minus: side(&collect(|r| r.minus)),
        table,
    })
}

/// Decides whether `md(f, x)` exists from an estimate: every available
/// upper and lower value is finite, the last quotient changes are below
/// `tol`, and the spread of the estimates is at most `max(tol, 3·cauchy)`.
/// Returns the midpoint of the estimates.
pub fn metric_derivative_of(est: &DerivedNumberEstimate, tol: f64) -> Option<f64> {
    let mut values = Vec::with_capacity(4);
    let mut cauchy: f64 = 0.0;
    for s in est.sides() {
        values.push(s.upper.finite()?);
        values.push(s.lower.finite()?);
        cauchy = cauchy.max(s.cauchy);
    }
    if values.is_empty() || cauchy > tol {
        return None;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min <= tol.max(3.0 * cauchy)).then_some(0.5 * (max + min))
}

/// `md(f, x)` if the derived numbers agree, `None` otherwise.
pub fn metric_derivative(curve: &Curve, x: f64, ladder: &Ladder, tol: f64) -> Result<Option<f64>> {
    Ok(metric_derivative_of(
        &derived_numbers(curve, x, ladder)?,
        tol,
    ))
}
