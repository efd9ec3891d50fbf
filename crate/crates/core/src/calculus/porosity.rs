use serde::Serialize;

use super::Ladder;
use crate::error::{Error, Result};
use crate::sets::ClosedSet;

/// A certified gap: `B(z, r)` (and, in the symmetric variant, also
/// `B(2x − z, r)`) lies in `B(x, R) \ M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStructure {
    pub x: f64,
    pub symmetric: bool,
    /// The largest certified gap at each scale that has one.
    pub records: Vec<GapRecord>,
    /// `2·max r/R`, a lower bound for the (symmetric) upper porosity of `M`
    /// at `x` as far as the sampled scales can tell.
    pub bound: f64,
}

fn certify(set: &ClosedSet, x: f64, rec: &GapRecord, symmetric: bool) -> bool {
    let inside = |z: f64| x - rec.big_r <= z - rec.r && z + rec.r <= x + rec.big_r;
    let clear = |z: f64| inside(z) && set.misses_open(z - rec.r, z + rec.r);
    clear(rec.z) && (!symmetric || clear(2.0 * x - rec.z))
}

fn estimate(set: &ClosedSet, x: f64, scales: &Ladder, symmetric: bool) -> Result<GapStructure> {
    scales.validate()?;
    if !set.contains(x) {
        return Err(Error::NotInSet { x });
    }
    let mirrored = set.union(&set.reflect(x));
    let mut records = Vec::new();
    for big_r in scales.scales() {
        let gaps = if symmetric {
            mirrored.gaps_within(x, x + big_r)
        } else {
            set.gaps_within(x - big_r, x + big_r)
        };
        let best = gaps
            .into_iter()
            .filter(|g| g.len() > 0.0)
            .max_by(|a, b| a.len().total_cmp(&b.len()));
        if let Some(g) = best {
            let rec = GapRecord {
                big_r,
                r: 0.5 * g.len(),
                z: g.mid(),
            };
            if certify(set, x, &rec, symmetric) {
                records.push(rec);
            }
        }
    }
    let bound = records
        .iter()
        .map(|r| 2.0 * r.r / r.big_r)
        .fold(0.0, f64::max);
    Ok(GapStructure {
        x,
        symmetric,
        records,
        bound,
    })
}

/// For each scale `R` the largest `r` with `B(z, r) ∪ B(2x − z, r) ⊂ B(x,
/// R) \ M`; the bound is `2·max r/R`.
pub fn symmetric_porosity_lower_bound(
    set: &ClosedSet,
    x: f64,
    scales: &Ladder,
) -> Result<GapStructure> {
    estimate(set, x, scales, true)
}

/// The single-ball variant: the largest `r` with `B(z, r) ⊂ B(x, R) \ M`.
pub fn upper_porosity_lower_bound(
    set: &ClosedSet,
    x: f64,
    scales: &Ladder,
) -> Result<GapStructure> {
    estimate(set, x, scales, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Interval;

    fn dyadic() -> ClosedSet {
        ClosedSet::from_points(std::iter::once(0.0).chain((1..=60).flat_map(|n| {
            let p = 2f64.powi(-n);
            [p, -p]
        })))
    }

    #[test]
    fn dyadic_points_at_zero() {
        let scales = Ladder::new(0.5, 0.5, 30).unwrap();
        let g = symmetric_porosity_lower_bound(&dyadic(), 0.0, &scales).unwrap();
        assert!(g.bound >= 0.5 - 1e-9, "{}", g.bound);
        assert_eq!(g.records.len(), 30);
        for r in &g.records {
            // Independent check of each recorded gap pair against the points.
            for n in 1..=60 {
                let p = 2f64.powi(-n);
                for m in [p, -p, 0.0] {
                    assert!((m - r.z).abs() >= r.r && (m + r.z).abs() >= r.r);
                }
            }
        }
        let u = upper_porosity_lower_bound(&dyadic(), 0.0, &scales).unwrap();
        assert!(u.bound >= g.bound);
    }

    #[test]
    fn interval_has_no_gaps() {
        let m = ClosedSet::from_intervals([Interval::new(0.0, 1.0).unwrap()]);
        let scales = Ladder::new(0.25, 0.5, 10).unwrap();
        let g = symmetric_porosity_lower_bound(&m, 0.5, &scales).unwrap();
        assert_eq!(g.bound, 0.0);
        assert!(g.records.is_empty());
    }

    #[test]
    fn points_outside_are_rejected() {
        let scales = Ladder::new(0.25, 0.5, 10).unwrap();
        assert!(matches!(
            symmetric_porosity_lower_bound(&dyadic(), 0.3, &scales),
            Err(Error::NotInSet { .. })
        ));
    }

    #[test]
    fn one_sided_set_is_not_symmetrically_porous_beyond_its_gap() {
        // M = [−1, 0] ∪ {2^{-n}}: the left side is solid, so symmetric gaps
        // do not exist while single-ball gaps do.
        let m = ClosedSet::from_intervals(
            std::iter::once(Interval::new(-1.0, 0.0).unwrap()).chain((1..=40).map(|n| Interval {
                lo: 2f64.powi(-n),
                hi: 2f64.powi(-n),
            })),
        );
        let scales = Ladder::new(0.5, 0.5, 20).unwrap();
        assert_eq!(
            symmetric_porosity_lower_bound(&m, 0.0, &scales)
                .unwrap()
                .bound,
            0.0
        );
        assert!(upper_porosity_lower_bound(&m, 0.0, &scales).unwrap().bound >= 0.5 - 1e-12);
    }
}
