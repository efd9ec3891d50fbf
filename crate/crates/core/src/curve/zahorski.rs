use std::sync::Arc;

use super::homeo::invert_monotone;
use super::{Homeomorphism, Interval};
use crate::error::{Error, Result};
use crate::sets::ClosedSet;

/// Exact antiderivative of `s ↦ dist(s, M)` on an interval. The distance
/// function is piecewise linear with knots at the points of `M` and at the
/// midpoints between consecutive points, so the trapezoid rule on the knots
/// is exact.
struct DistIntegral {
    set: ClosedSet,
    knots: Vec<f64>,
    cum: Vec<f64>,
}

impl DistIntegral {
    fn new(set: ClosedSet, domain: Interval) -> Self {
        let mut knots = vec![domain.lo, domain.hi];
        let comps = set.components();
        for (i, c) in comps.iter().enumerate() {
            knots.push(c.lo);
            if let Some(next) = comps.get(i + 1) {
                knots.push(0.5 * (c.hi + next.lo));
            }
        }
        knots.retain(|k| domain.contains(*k));
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut cum = vec![0.0];
        for w in knots.windows(2) {
            let area = 0.5 * (set.dist(w[0]) + set.dist(w[1])) * (w[1] - w[0]);
            cum.push(cum.last().unwrap() + area);
        }
        DistIntegral { set, knots, cum }
    }

    fn at(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0] {
            return 0.0;
        }
        if x >= *k.last().unwrap() {
            return *self.cum.last().unwrap();
        }
        let i = k.partition_point(|&t| t <= x) - 1;
        self.cum[i] + 0.5 * (self.set.dist(k[i]) + self.set.dist(x)) * (x - k[i])
    }
}

/// A C¹ increasing self-map `h` of `domain` with `h′ = 0` exactly on `M`:
/// `h(x) = a + (b − a)·∫ₐˣ dist(s, M) ds / ∫ₐᵇ dist(s, M) ds`.
///
/// `M` must be a closed null set, which for this representation means a
/// finite set of points. The empty set gives the identity.
pub fn zahorski_homeomorphism(set: &ClosedSet, domain: Interval) -> Result<Homeomorphism> {
    set.require_null()?;
    if domain.is_empty() {
        return Err(Error::InvalidParameter("degenerate domain".into()));
    }
    if set.is_empty() {
        let mut h = Homeomorphism::identity(domain);
        h.kind = "zahorski".into();
        return Ok(h);
    }
    let integral = Arc::new(DistIntegral::new(set.clone(), domain));
    let total = integral.at(domain.hi);
    let scale = domain.len() / total;
    let (i1, i3) = (integral.clone(), integral);
    let forward = move |x: f64| {
        if x >= domain.hi {
            domain.hi
        } else {
            domain.lo + scale * i1.at(x)
        }
    };
    let fwd = Arc::new(forward);
    let f2 = fwd.clone();
    Ok(Homeomorphism::from_fns(
        "zahorski",
        domain,
        domain,
        move |x| fwd(x),
        move |y| invert_monotone(&*f2, domain, y),
    )
    .with_derivative(move |x| scale * i3.set.dist(x)))
}
