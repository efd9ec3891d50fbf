//! Norms on the plane and on truncated ℓ₂.
//!
//! Every curve in this crate takes values in one of the spaces described by
//! [`NormSpec`]. Planar norms act on 2-vectors; `L2Truncated` acts on vectors
//! of the stated dimension.

use std::fmt;
use std::ops::{Deref, DerefMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute slack used when checking the norm axioms on samples.
pub const AXIOM_SLACK: f64 = 1e-12;

/// Number of random vectors drawn by [`validate_norm_spec`].
pub const VALIDATION_SAMPLES: usize = 2048;

const VALIDATION_SEED: u64 = 0x6d65_7472_6963;

/// A point of the ambient space.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector(pub SmallVec<[f64; 4]>);

impl Vector {
    pub fn planar(x: f64, y: f64) -> Self {
        Vector(SmallVec::from_slice(&[x, y]))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(SmallVec::from_elem(0.0, dim))
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Vector(SmallVec::from_slice(v))
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.iter().zip(other.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.iter().zip(other.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.iter().map(|a| c * a).collect())
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<[f64; 2]> for Vector {
    fn from(p: [f64; 2]) -> Self {
        Vector::planar(p[0], p[1])
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(SmallVec::from_vec(v))
    }
}

/// The norm of the ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean2d,
    #[serde(rename = "l1_2d")]
    L1,
    #[serde(rename = "lp_2d")]
    Lp {
        p: f64,
    },
    /// Minkowski functional of a centrally symmetric convex polygon.
    PolygonGauge {
        vertices: Vec<[f64; 2]>,
    },
    /// ℓ₂ restricted to the first `dim` coordinates.
    L2Truncated {
        dim: usize,
    },
}

impl NormSpec {
    pub fn dim(&self) -> usize {
        match self {
            NormSpec::L2Truncated { dim } => *dim,
            _ => 2,
        }
    }

    pub fn is_planar(&self) -> bool {
        !matches!(self, NormSpec::L2Truncated { .. })
    }

    /// Regular hexagon with a vertex on the positive x-axis.
    pub fn hexagon() -> Self {
        let h = 3f64.sqrt() / 2.0;
        NormSpec::PolygonGauge {
            vertices: vec![
                [1.0, 0.0],
                [0.5, h],
                [-0.5, h],
                [-1.0, 0.0],
                [-0.5, -h],
                [0.5, -h],
            ],
        }
    }

    /// Evaluates the norm without checking the dimension.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean2d => v[0].hypot(v[1]),
            NormSpec::L1 => v[0].abs() + v[1].abs(),
            NormSpec::Lp { p } => lp_norm(v[0], v[1], *p),
            NormSpec::PolygonGauge { vertices } => polygon_gauge(vertices, v[0], v[1]),
            NormSpec::L2Truncated { .. } => {
                let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if m == 0.0 || !m.is_finite() {
                    return m;
                }
                m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
            }
        }
    }

    /// Distance between two points of the space.
    pub fn dist(&self, u: &[f64], v: &[f64]) -> f64 {
        let d: SmallVec<[f64; 4]> = u.iter().zip(v).map(|(a, b)| a - b).collect();
        self.norm(&d)
    }

    pub fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// Evaluates `‖v‖` for the given norm, checking that `v` has the right length.
pub fn norm_eval(spec: &NormSpec, v: &[f64]) -> Result<f64> {
    spec.check_dim(v)?;
    Ok(spec.norm(v))
}

fn lp_norm(x: f64, y: f64, p: f64) -> f64 {
    let (x, y) = (x.abs(), y.abs());
    let m = x.max(y);
    if m == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return m;
    }
    m * ((x / m).powf(p) + (y / m).powf(p)).powf(1.0 / p)
}

/// Gauge of a convex polygon containing the origin in its interior: the
/// largest ratio `⟨n_i, v⟩ / ⟨n_i, p_i⟩` over the edge half-planes. This is
/// the per-edge ray intersection written as a maximum, so it needs no search.
fn polygon_gauge(vertices: &[[f64; 2]], x: f64, y: f64) -> f64 {
    if x == 0.0 && y == 0.0 {
        return 0.0;
    }
    let orient = signed_area(vertices).signum();
    let n = vertices.len();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        // Outward normal for a counter-clockwise boundary.
        let (nx, ny) = (orient * (q[1] - p[1]), orient * (p[0] - q[0]));
        let c = nx * p[0] + ny * p[1];
        let s = nx * x + ny * y;
        if c <= 0.0 {
            // The origin is not interior; the functional is unbounded along
            // directions leaving through this edge.
            if s > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        best = best.max(s / c);
    }
    best.max(0.0)
}

fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

/// The norm axiom a [`NormSpec`] failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Symmetry,
    Homogeneity,
    TriangleInequality,
    ConvexPosition,
    Definiteness,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Homogeneity => "homogeneity",
            Axiom::TriangleInequality => "triangle inequality",
            Axiom::ConvexPosition => "convex position",
            Axiom::Definiteness => "definiteness",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Vectors exhibiting the failure.
    pub witness: Vec<Vec<f64>>,
    pub detail: String,
}

/// Checks the norm axioms for `spec`, structurally where possible and on a
/// deterministic sample of vectors otherwise. Violations are returned as
/// values.
pub fn validate_norm_spec(spec: &NormSpec) -> std::result::Result<(), Violation> {
    match spec {
        NormSpec::PolygonGauge { vertices } => validate_polygon(vertices)?,
        NormSpec::L2Truncated { dim } if *dim == 0 => {
            return Err(Violation {
                axiom: Axiom::Definiteness,
                witness: vec![],
                detail: "zero-dimensional space".into(),
            })
        }
        NormSpec::Lp { p } if !(p.is_finite() || p.is_infinite()) || *p <= 0.0 => {
            return Err(Violation {
                axiom: Axiom::Definiteness,
                witness: vec![],
                detail: format!("exponent p = {p} is not positive"),
            })
        }
        _ => {}
    }
    sampled_axioms(spec)
}

fn validate_polygon(vertices: &[[f64; 2]]) -> std::result::Result<(), Violation> {
    let n = vertices.len();
    if n < 4 || n % 2 == 1 {
        // A centrally symmetric polygon has an even number (≥ 4) of vertices;
        // name the first vertex whose mirror image is missing.
        let missing = vertices
            .iter()
            .find(|v| !vertices.iter().any(|w| close(w, &[-v[0], -v[1]])))
            .copied()
            .or_else(|| vertices.first().copied())
            .unwrap_or([0.0, 0.0]);
        return Err(Violation {
            axiom: Axiom::Symmetry,
            witness: vec![missing.to_vec(), vec![-missing[0], -missing[1]]],
            detail: format!("{n} vertices cannot form a centrally symmetric polygon"),
        });
    }
    for v in vertices {
        let mirror = [-v[0], -v[1]];
        if !vertices.iter().any(|w| close(w, &mirror)) {
            return Err(Violation {
                axiom: Axiom::Symmetry,
                witness: vec![v.to_vec(), mirror.to_vec()],
                detail: "vertex set is not closed under v ↦ -v".into(),
            });
        }
    }
    let orient = signed_area(vertices);
    if orient == 0.0 {
        return Err(Violation {
            axiom: Axiom::ConvexPosition,
            witness: vec![],
            detail: "degenerate polygon".into(),
        });
    }
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let r = vertices[(i + 2) % n];
        let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
        if cross * orient.signum() <= AXIOM_SLACK {
            return Err(Violation {
                axiom: Axiom::ConvexPosition,
                witness: vec![p.to_vec(), q.to_vec(), r.to_vec()],
                detail: if cross.abs() <= AXIOM_SLACK {
                    "three consecutive vertices are collinear".into()
                } else {
                    "vertices are not in convex position".into()
                },
            });
        }
    }
    Ok(())
}

fn close(a: &[f64; 2], b: &[f64; 2]) -> bool {
    (a[0] - b[0]).abs() <= AXIOM_SLACK && (a[1] - b[1]).abs() <= AXIOM_SLACK
}

fn sample_vectors(dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let mut out = Vec::with_capacity(VALIDATION_SAMPLES + 2 * dim * dim);
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        out.push(e);
        for j in 0..dim {
            if i != j {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e[j] = -1.0;
                out.push(e);
            }
        }
    }
    while out.len() < VALIDATION_SAMPLES {
        out.push((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    out
}

fn sampled_axioms(spec: &NormSpec) -> std::result::Result<(), Violation> {
    let dim = spec.dim();
    let samples = sample_vectors(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED ^ 1);

    let zero = vec![0.0; dim];
    if spec.norm(&zero) != 0.0 {
        return Err(Violation {
            axiom: Axiom::Definiteness,
            witness: vec![zero],
            detail: "norm of the zero vector is not zero".into(),
        });
    }

    for v in &samples {
        let nv = spec.norm(v);
        if !(nv.is_finite() && nv > 0.0) {
            return Err(Violation {
                axiom: Axiom::Definiteness,
                witness: vec![v.clone()],
                detail: format!("norm {nv} of a nonzero vector"),
            });
        }
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let nn = spec.norm(&neg);
        if (nv - nn).abs() > AXIOM_SLACK * nv.max(1.0) {
            return Err(Violation {
                axiom: Axiom::Symmetry,
                witness: vec![v.clone(), neg],
                detail: format!("‖v‖ = {nv}, ‖-v‖ = {nn}"),
            });
        }
        let c: f64 = rng.gen_range(-3.0..3.0);
        let cv: Vec<f64> = v.iter().map(|x| c * x).collect();
        let lhs = spec.norm(&cv);
        let rhs = c.abs() * nv;
        if (lhs - rhs).abs() > AXIOM_SLACK * rhs.max(1.0) {
            return Err(Violation {
                axiom: Axiom::Homogeneity,
                witness: vec![v.clone(), vec![c]],
                detail: format!("‖cv‖ = {lhs}, |c|‖v‖ = {rhs}"),
            });
        }
    }

    let check_pair = |u: &Vec<f64>, v: &Vec<f64>| -> std::result::Result<(), Violation> {
        let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        let lhs = spec.norm(&sum);
        let rhs = spec.norm(u) + spec.norm(v);
        if lhs > rhs + AXIOM_SLACK * rhs.max(1.0) {
            return Err(Violation {
                axiom: Axiom::TriangleInequality,
                witness: vec![u.clone(), v.clone()],
                detail: format!("‖u+v‖ = {lhs} > ‖u‖+‖v‖ = {rhs}"),
            });
        }
        Ok(())
    };
    // Basis-like vectors against each other first: they give the simplest
    // witnesses.
    let special = 2 * dim * dim;
    for i in 0..special.min(samples.len()) {
        for j in 0..special.min(samples.len()) {
            check_pair(&samples[i], &samples[j])?;
        }
    }
    for w in samples.windows(2) {
        check_pair(&w[0], &w[1])?;
    }
    for _ in 0..samples.len() {
        let i = rng.gen_range(0..samples.len());
        let j = rng.gen_range(0..samples.len());
        check_pair(&samples[i], &samples[j])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> NormSpec {
        NormSpec::PolygonGauge {
            vertices: vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]],
        }
    }

    /// Smallest λ with v/λ inside the polygon, by bisection on the
    /// point-in-convex-polygon predicate.
    fn gauge_by_bisection(vertices: &[[f64; 2]], v: [f64; 2]) -> f64 {
        let inside = |p: [f64; 2]| {
            let n = vertices.len();
            let orient = signed_area(vertices).signum();
            (0..n).all(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                orient * ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) >= 0.0
            })
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while !inside([v[0] / hi, v[1] / hi]) {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid > 0.0 && inside([v[0] / mid, v[1] / mid]) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn closed_forms() {
        assert_eq!(norm_eval(&NormSpec::L1, &[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(norm_eval(&NormSpec::Euclidean2d, &[3.0, 4.0]).unwrap(), 5.0);
        let l3 = NormSpec::Lp { p: 3.0 };
        assert!((l3.norm(&[1.0, 1.0]) - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let l2 = NormSpec::L2Truncated { dim: 3 };
        assert_eq!(l2.norm(&[2.0, 3.0, 6.0]), 7.0);
    }

    #[test]
    fn square_gauge_matches_bisection() {
        let sq = square();
        let oracle = gauge_by_bisection(
            &[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]],
            [0.5, 0.25],
        );
        assert!((oracle - 0.5).abs() < 1e-12);
        assert!((norm_eval(&sq, &[0.5, 0.25]).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn hexagon_gauge_matches_bisection_and_vertices_have_norm_one() {
        let hex = NormSpec::hexagon();
        let NormSpec::PolygonGauge { vertices } = &hex else {
            unreachable!()
        };
        for v in vertices {
            assert!((hex.norm(v) - 1.0).abs() < 1e-10);
        }
        for &(x, y) in &[(0.3, 0.7), (-2.0, 0.1), (0.0, -1.5), (1e-3, 4e-3)] {
            let o = gauge_by_bisection(vertices, [x, y]);
            assert!((hex.norm(&[x, y]) - o).abs() < 1e-10 * o.max(1.0));
        }
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        for spec in [
            NormSpec::Euclidean2d,
            NormSpec::L1,
            NormSpec::Lp { p: 1.5 },
            square(),
            NormSpec::hexagon(),
        ] {
            assert_eq!(spec.norm(&[0.0, 0.0]), 0.0);
        }
        assert_eq!(NormSpec::L2Truncated { dim: 5 }.norm(&[0.0; 5]), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = norm_eval(&NormSpec::Euclidean2d, &[1.0, 2.0, 3.0]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                got: 3
            }
        );
    }

    #[test]
    fn validation_accepts_genuine_norms() {
        for spec in [
            NormSpec::Euclidean2d,
            NormSpec::L1,
            NormSpec::Lp { p: 1.0 },
            NormSpec::Lp { p: 4.0 },
            square(),
            NormSpec::hexagon(),
            NormSpec::L2Truncated { dim: 6 },
        ] {
            assert_eq!(validate_norm_spec(&spec), Ok(()), "{spec:?}");
        }
    }

    #[test]
    fn asymmetric_polygon_is_rejected() {
        let spec = NormSpec::PolygonGauge {
            vertices: vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]],
        };
        let v = validate_norm_spec(&spec).unwrap_err();
        assert_eq!(v.axiom, Axiom::Symmetry);
        assert_eq!(v.witness.len(), 2);
    }

    #[test]
    fn collinear_vertices_are_rejected() {
        let spec = NormSpec::PolygonGauge {
            vertices: vec![
                [1.0, 0.0],
                [1.0, 1.0],
                [-1.0, 1.0],
                [-1.0, 0.0],
                [-1.0, -1.0],
                [1.0, -1.0],
            ],
        };
        assert_eq!(
            validate_norm_spec(&spec).unwrap_err().axiom,
            Axiom::ConvexPosition
        );
    }

    #[test]
    fn lp_below_one_fails_triangle_inequality() {
        let v = validate_norm_spec(&NormSpec::Lp { p: 0.5 }).unwrap_err();
        assert_eq!(v.axiom, Axiom::TriangleInequality);
        let (u, w) = (&v.witness[0], &v.witness[1]);
        let spec = NormSpec::Lp { p: 0.5 };
        let s: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + b).collect();
        assert!(spec.norm(&s) > spec.norm(u) + spec.norm(w));
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&NormSpec::Lp { p: 3.0 }).unwrap();
        assert_eq!(s, r#"{"kind":"lp_2d","p":3.0}"#);
        let back: NormSpec = serde_json::from_str(r#"{"kind":"l1_2d"}"#).unwrap();
        assert_eq!(back, NormSpec::L1);
        let back: NormSpec = serde_json::from_str(r#"{"kind":"l2_truncated","dim":4}"#).unwrap();
        assert_eq!(back, NormSpec::L2Truncated { dim: 4 });
        let poly: NormSpec = serde_json::from_str(
            r#"{"kind":"polygon_gauge","vertices":[[1,0],[0,1],[-1,0],[0,-1]]}"#,
        )
        .unwrap();
        assert_eq!(poly.norm(&[0.5, 0.5]), 1.0);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn planar_specs() -> Vec<NormSpec> {
        vec![
            NormSpec::Euclidean2d,
            NormSpec::L1,
            NormSpec::Lp { p: 1.7 },
            NormSpec::Lp { p: 5.0 },
            NormSpec::hexagon(),
        ]
    }

    proptest! {
        #[test]
        fn triangle_inequality(ux in -10.0..10.0f64, uy in -10.0..10.0f64,
                               vx in -10.0..10.0f64, vy in -10.0..10.0f64) {
            for spec in planar_specs() {
                let lhs = spec.norm(&[ux + vx, uy + vy]);
                let rhs = spec.norm(&[ux, uy]) + spec.norm(&[vx, vy]);
                prop_assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
            }
        }

        #[test]
        fn homogeneity_and_symmetry(x in -10.0..10.0f64, y in -10.0..10.0f64, c in -5.0..5.0f64) {
            for spec in planar_specs() {
                let n = spec.norm(&[x, y]);
                prop_assert!((spec.norm(&[c * x, c * y]) - c.abs() * n).abs() <= 1e-12 * n.max(1.0) * c.abs().max(1.0));
                prop_assert!((spec.norm(&[-x, -y]) - n).abs() <= 1e-12 * n.max(1.0));
            }
        }
    }
}
