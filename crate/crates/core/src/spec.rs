//! JSON curve specifications and the builders behind them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::constructions::{
    build_box_curve, build_cantor_hat_curve, build_l2_kink_example, build_polyline_spiral,
    build_spiral_curve_with_b, HatCurveSpec, KinkExampleSpec,
};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::norm::NormSpec;

fn default_depth() -> usize {
    4
}

fn default_n_max() -> usize {
    20
}

/// A curve to build, tagged by `"type"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveSpec {
    Spiral {
        q: f64,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
    Box {
        alpha: f64,
    },
    Hat {
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphas: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        qs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_1: Option<f64>,
    },
    Kink {
        #[serde(default = "default_n_max")]
        n_max: usize,
        /// Explicit weights and kinks replace the dyadic defaults.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kinks: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<f64>,
    },
    Polyline {
        norm: NormSpec,
        q: f64,
        alpha: f64,
    },
    /// `t ↦ (t, 0)` on `[a, b]`.
    Segment {
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
    },
    /// `t ↦ (|t|, 0)` on `[−1, 1]`.
    Abs,
    /// `t ↦ (t, t²/2)` on `[0, 1]`.
    Parabola,
    /// `t ↦ (min(t, 1/4) + max(t − 1/2, 0), 0)` on `[0, 1]`.
    Plateau,
    /// The unit circle on `[0, 2π]`.
    Circle,
    /// A unit jump at `0` on `[−1, 1]`.
    Step,
}

/// A built curve with the constants its builder derived.
#[derive(Clone, Debug)]
pub struct BuiltCurve {
    pub curve: Curve,
    pub metadata: serde_json::Value,
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("bad curve spec: {e}")))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CurveSpec::Spiral { .. } => "spiral",
            CurveSpec::Box { .. } => "box",
            CurveSpec::Hat { .. } => "hat",
            CurveSpec::Kink { .. } => "kink",
            CurveSpec::Polyline { .. } => "polyline",
            CurveSpec::Segment { .. } => "segment",
            CurveSpec::Abs => "abs",
            CurveSpec::Parabola => "parabola",
            CurveSpec::Plateau => "plateau",
            CurveSpec::Circle => "circle",
            CurveSpec::Step => "step",
        }
    }

    pub fn hat_spec(&self) -> Option<HatCurveSpec> {
        let CurveSpec::Hat {
            depth,
            alphas,
            qs,
            bs,
            theta_1,
        } = self
        else {
            return None;
        };
        let mut spec = HatCurveSpec::default_schedule(*depth);
        if let Some(a) = alphas {
            spec.alphas = a.clone();
        }
        if let Some(q) = qs {
            spec.qs = q.clone();
        }
        spec.bs = bs.clone();
        if let Some(t) = theta_1 {
            spec.theta_1 = *t;
        }
        Some(spec)
    }

    pub fn kink_spec(&self) -> Option<KinkExampleSpec> {
        let CurveSpec::Kink {
            n_max,
            weights,
            kinks,
            tail,
        } = self
        else {
            return None;
        };
        let mut spec = KinkExampleSpec::dyadic(*n_max);
        if let Some(w) = weights {
            spec.weights = w.clone();
        }
        if let Some(k) = kinks {
            spec.kinks = k.clone();
        }
        if let Some(t) = tail {
            spec.tail = *t;
        }
        Some(spec)
    }

    pub fn build(&self) -> Result<BuiltCurve> {
        let planar = |a: f64, b: f64, f: fn(f64) -> (f64, f64), label: &str| -> Result<Curve> {
            Ok(Curve::planar(a, b, NormSpec::Euclidean2d, f)?.with_label(label))
        };
        let built = match self {
            CurveSpec::Spiral { q, alpha, b } => {
                let s = build_spiral_curve_with_b(*q, *alpha, *b)?;
                BuiltCurve {
                    metadata: json!({ "type": "spiral", "params": s.params }),
                    curve: s.curve,
                }
            }
            CurveSpec::Box { alpha } => {
                let curve = build_box_curve(*alpha)?;
                BuiltCurve {
                    metadata: json!({
                        "type": "box",
                        "alpha": alpha,
                        "h": crate::constructions::box_height(*alpha)?,
                        "domain": curve.domain(),
                    }),
                    curve,
                }
            }
            CurveSpec::Hat { .. } => {
                let spec = self.hat_spec().expect("hat variant");
                let hat = build_cantor_hat_curve(&spec)?;
                BuiltCurve {
                    metadata: hat.metadata(),
                    curve: hat.curve,
                }
            }
            CurveSpec::Kink { .. } => {
                let spec = self.kink_spec().expect("kink variant");
                let curve = build_l2_kink_example(&spec)?;
                BuiltCurve {
                    metadata: json!({ "type": "kink", "spec": spec }),
                    curve,
                }
            }
            CurveSpec::Polyline { norm, q, alpha } => {
                let p = build_polyline_spiral(norm, *q, *alpha)?;
                BuiltCurve {
                    metadata: json!({ "type": "polyline", "polyline": p }),
                    curve: p.curve,
                }
            }
            CurveSpec::Segment { a, b } => {
                let curve = Curve::segment(a.unwrap_or(0.0), b.unwrap_or(1.0))?;
                BuiltCurve {
                    metadata: json!({ "type": "segment", "domain": curve.domain() }),
                    curve,
                }
            }
            CurveSpec::Abs => BuiltCurve {
                curve: planar(-1.0, 1.0, |t| (t.abs(), 0.0), "abs")?.with_breakpoints(vec![0.0])?,
                metadata: json!({ "type": "abs" }),
            },
            CurveSpec::Parabola => BuiltCurve {
                curve: planar(0.0, 1.0, |t| (t, 0.5 * t * t), "parabola")?,
                metadata: json!({ "type": "parabola" }),
            },
            CurveSpec::Plateau => BuiltCurve {
                curve: planar(
                    0.0,
                    1.0,
                    |t| (t.min(0.25) + (t - 0.5).max(0.0), 0.0),
                    "plateau",
                )?
                .with_breakpoints(vec![0.25, 0.5])?,
                metadata: json!({ "type": "plateau" }),
            },
            CurveSpec::Circle => BuiltCurve {
                curve: planar(0.0, 2.0 * PI, |t| (t.cos(), t.sin()), "circle")?,
                metadata: json!({ "type": "circle" }),
            },
            CurveSpec::Step => BuiltCurve {
                curve: planar(
                    -1.0,
                    1.0,
                    |t| (if t < 0.0 { 0.0 } else { 1.0 }, 0.0),
                    "step",
                )?
                .with_breakpoints(vec![0.0])?,
                metadata: json!({ "type": "step" }),
            },
        };
        Ok(built)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_type() {
        let cases = [
            r#"{"type": "spiral", "q": 0.9, "alpha": 1.0, "b": 2.5}"#,
            r#"{"type": "box", "alpha": 0.7853981633974483}"#,
            r#"{"type": "hat", "depth": 2}"#,
            r#"{"type": "kink", "n_max": 8}"#,
            r#"{"type": "polyline", "norm": {"kind": "l1_2d"}, "q": 0.9, "alpha": 1.0}"#,
            r#"{"type": "segment"}"#,
            r#"{"type": "abs"}"#,
            r#"{"type": "parabola"}"#,
            r#"{"type": "plateau"}"#,
            r#"{"type": "circle"}"#,
            r#"{"type": "step"}"#,
        ];
        for text in cases {
            let spec = CurveSpec::from_json(text).unwrap();
            let built = spec.build().unwrap();
            assert_eq!(built.metadata["type"], spec.kind(), "{text}");
            let back = serde_json::to_string(&spec).unwrap();
            assert_eq!(CurveSpec::from_json(&back).unwrap(), spec);
        }
    }

    #[test]
    fn spiral_metadata_carries_constants() {
        let b = CurveSpec::Spiral {
            q: 0.9,
            alpha: 1.0,
            b: None,
        }
        .build()
        .unwrap();
        let p = &b.metadata["params"];
        assert_eq!(p["b"], 2.3);
        for key in ["k", "beta", "s0", "s1", "L", "t_star"] {
            assert!(p[key].is_number(), "{key}");
        }
    }

    #[test]
    fn errors_surface() {
        assert!(CurveSpec::from_json(r#"{"type": "torus"}"#).is_err());
        let bad = CurveSpec::Kink {
            n_max: 4,
            weights: Some(vec![0.5; 4].into_iter().map(|w: f64| w * 1.1).collect()),
            kinks: None,
            tail: None,
        };
        assert!(bad.build().is_err());
        assert!(CurveSpec::Spiral {
            q: 0.9,
            alpha: 1.0,
            b: Some(2.1)
        }
        .build()
        .is_err());
    }
}
