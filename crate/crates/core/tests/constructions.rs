use std::f64::consts::FRAC_PI_4;

use metric_curves::constructions::{
    build_box_curve, build_cantor_hat_curve, build_l2_kink_example, build_polyline_spiral,
    build_spiral_curve, c_m_bound, psi, sampled_pair_ratio, van_der_corput, CantorCode,
    HatCurveSpec, KinkExampleSpec,
};
use metric_curves::spec::CurveSpec;
use metric_curves::NormSpec;
use proptest::prelude::*;

#[test]
fn polyline_spirals_in_several_norms() {
    for (norm, q) in [
        (NormSpec::Euclidean2d, 0.9),
        (NormSpec::Lp { p: 3.0 }, 0.85),
        (NormSpec::hexagon(), 0.8),
    ] {
        let p = build_polyline_spiral(&norm, q, 1.0).unwrap();
        assert!(p.certificate.min_ratio >= q, "{norm:?}");
        let again = sampled_pair_ratio(&p.curve, 5_000, 99);
        assert!(again.min_ratio >= q, "{norm:?}: {}", again.min_ratio);
        assert!(p.knots.windows(2).all(|w| w[0].0 < w[1].0));
    }
    assert!(build_polyline_spiral(&NormSpec::L1, 1.2, 1.0).is_err());
}

#[test]
fn spiral_defaults_and_box() {
    let s = build_spiral_curve(0.9, 1.0).unwrap();
    assert_eq!(s.params.b, 2.3);
    assert!(sampled_pair_ratio(&s.curve, 20_000, 1).min_ratio >= 0.9);
    let c = build_box_curve(FRAC_PI_4).unwrap();
    let cert = sampled_pair_ratio(&c, 20_000, 1);
    assert!((cert.min_ratio - 1.0).abs() < 1e-12);
    assert!(build_box_curve(2.0).is_err());
}

#[test]
fn hat_curve_layers() {
    let hat = build_cantor_hat_curve(&HatCurveSpec::default_schedule(5)).unwrap();
    assert_eq!(hat.depth(), 5);
    assert!(hat.total_length < 5.0);
    assert!((hat.total_length - hat.length_from_constants()).abs() < 1e-12);
    assert!(hat.resolved_depth() >= 3);
    let code: CantorCode = "01101".parse().unwrap();
    let p = hat.cantor_point(&code).unwrap();
    assert!((-1.0..=1.0).contains(&p.x) && p.bracket.contains(p.x));
    assert!(hat.cantor_point(&"0110100".parse().unwrap()).is_err());
    assert!("012".parse::<CantorCode>().is_err());
    assert!((psi(4, 1.0).unwrap() - 3.0).abs() < 1e-15);
    assert!(psi(2, 1.0).is_err());
}

#[test]
fn kink_spec_validation_and_bounds() {
    let spec = KinkExampleSpec::dyadic(12);
    let c = build_l2_kink_example(&spec).unwrap();
    assert_eq!(c.space().dim(), 24);
    let c1 = c_m_bound(1, &spec.weights).unwrap();
    assert!(c1 < 1.0);
    assert!(c_m_bound(0, &spec.weights).is_err());
    let mut bad = spec.clone();
    bad.weights[0] *= 1.5;
    assert!(build_l2_kink_example(&bad).is_err());
    let mut outside = spec;
    outside.kinks[0] = 1.5;
    assert!(build_l2_kink_example(&outside).is_err());
}

#[test]
fn every_spec_kind_builds() {
    for text in [
        r#"{"type": "hat", "depth": 3, "theta_1": 0.05}"#,
        r#"{"type": "kink", "n_max": 6}"#,
        r#"{"type": "polyline", "norm": {"kind": "lp_2d", "p": 4.0}, "q": 0.8, "alpha": 0.9}"#,
        r#"{"type": "segment", "a": -2.0, "b": 3.0}"#,
    ] {
        let spec = CurveSpec::from_json(text).unwrap();
        let built = spec.build().unwrap();
        assert_eq!(built.metadata["type"], spec.kind());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn van_der_corput_stays_in_the_unit_interval(n in 1u64..100_000) {
        let v = van_der_corput(n);
        prop_assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn spirals_are_q_bi_lipschitz(q in 0.3f64..0.95, alpha in 0.2f64..1.4) {
        let s = build_spiral_curve(q, alpha).unwrap();
        prop_assert!(sampled_pair_ratio(&s.curve, 4_000, 11).min_ratio >= q);
        let p = &s.params;
        prop_assert!((p.t_star_argument() + alpha).abs() < 1e-6);
    }

    #[test]
    fn kink_curves_are_one_lipschitz(n in 2usize..16, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        prop_assume!(s != t);
        let c = build_l2_kink_example(&KinkExampleSpec::dyadic(n)).unwrap();
        prop_assert!(c.chord(s, t) <= (t - s).abs() * (1.0 + 1e-12));
    }
}
