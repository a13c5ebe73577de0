use loewner_core::types::geometric_grid;
use loewner_core::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sqrt_pair_matches_closed_form(c in 0.0f64..6.0, t in 1e-6f64..2.0) {
        let d = DrivingFunction::sqrt(c, 2.0).unwrap();
        let p = singular_pair(&d, t, &cfg()).unwrap();
        let root = (c * c + 16.0).sqrt();
        let st = t.sqrt();
        prop_assert!((p.f_minus - 0.5 * (c - root) * st).abs() < 1e-8 * st);
        prop_assert!((p.f_plus - 0.5 * (c + root) * st).abs() < 1e-8 * st);
        prop_assert!(p.is_ordered());
    }

    #[test]
    fn side_measures_stay_in_unit_interval(c in 0.0f64..6.0, t in 1e-6f64..1.0) {
        let d = DrivingFunction::sqrt(c, 1.0).unwrap();
        let m = slit_side_measures(&d, t, &cfg()).unwrap();
        prop_assert!(m.m_left > 0.0 && m.m_right > 0.0);
        prop_assert!(m.m_left + m.m_right < 1.0);
        // the slit leans right for c > 0, so its left side faces the base point
        prop_assert!(m.m_left >= m.m_right * (1.0 - 1e-12));
    }

    #[test]
    fn capacity_scales_quadratically(theta in 0.3f64..2.8, alpha in 0.2f64..5.0) {
        let curve = generate_curve(&CurveSpec::Line { theta, length: 1.0 }, 257).unwrap();
        let base = hcap(&curve, &cfg()).unwrap();
        let scaled = hcap(&curve.scaled(alpha).unwrap(), &cfg()).unwrap();
        prop_assert!((scaled / (alpha * alpha * base) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn capacity_is_reflection_invariant(theta in 0.3f64..1.5) {
        let a = generate_curve(&CurveSpec::Line { theta, length: 1.0 }, 257).unwrap();
        let b = generate_curve(&CurveSpec::Line { theta: PI - theta, length: 1.0 }, 257).unwrap();
        let (ca, cb) = (hcap(&a, &cfg()).unwrap(), hcap(&b, &cfg()).unwrap());
        prop_assert!((ca - cb).abs() < 1e-12 * ca);
    }

    #[test]
    fn interval_measure_is_additive(a in -5.0f64..5.0, w1 in 1e-6f64..3.0, w2 in 1e-6f64..3.0) {
        let m = |x: f64, y: f64| harmonic_measure_interval(&IntervalOnR::new(x, y).unwrap());
        let whole = m(a, a + w1 + w2);
        prop_assert!((m(a, a + w1) + m(a + w1, a + w1 + w2) - whole).abs() < 1e-14);
        prop_assert!(whole > 0.0 && whole < 1.0);
    }

    #[test]
    fn extrapolation_recovers_cbrt_model(l in -10.0f64..10.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let t = geometric_grid(1e-3, 1e-9, 7).unwrap();
        let v: Vec<f64> = t.iter().map(|t| l + a * t.cbrt() + b * t.powf(2.0 / 3.0)).collect();
        let e = extrapolate_limit(&t, &v, ExtrapolationModel::CbrtT).unwrap();
        prop_assert!((e.limit - l).abs() < 1e-9 * (1.0 + l.abs()));
    }

    #[test]
    fn arc_oracle_keeps_the_base_point_inside(t in 1e-9f64..0.1) {
        let p = arc_params(t, &cfg()).unwrap();
        prop_assert!(p.beta1 < 0.0 && 0.0 < p.lambda0 && p.lambda0 < p.beta2);
        prop_assert!(p.residual1.abs() < 1e-9 && p.residual2.abs() < 1e-9);
    }
}
