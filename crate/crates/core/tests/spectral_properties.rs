use approx::assert_relative_eq;
use proptest::prelude::*;

use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::units::bose_occupation;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.1f64..100.0, 0.001f64..50.0, 10.0f64..400.0)
            .prop_map(|(l, g, o)| Family::lorentzian(l, g, o).unwrap()),
        (0.1f64..10.0, 0.3f64..3.0, 20.0f64..300.0).prop_map(|(l, s, c)| Family::ohmic(l, s, c).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn thermal_density_is_nonnegative(f in family(), t in 0.0f64..1000.0, x in -1.0f64..1.0) {
        let sd = SpectralDensity::new(f, 1000.0).unwrap().at_temperature(t).unwrap();
        prop_assert!(sd.eval(1000.0 * x) >= 0.0);
    }

    #[test]
    fn detailed_balance(f in family(), t in 1.0f64..1000.0, w in 0.5f64..999.0) {
        let bare = SpectralDensity::new(f, 1000.0).unwrap();
        let hot = bare.at_temperature(t).unwrap();
        let j = bare.eval(w);
        let diff = hot.eval(w) - hot.eval(-w);
        prop_assert!((diff - j).abs() <= 1e-12 * j.max(hot.eval(w)).max(1e-300), "{} vs {}", diff, j);
        // Negative side is absorption: J(ω) n(ω).
        let beta = hot.beta().unwrap();
        let n = bose_occupation(beta, w);
        prop_assert!((hot.eval(-w) - j * n).abs() <= 1e-12 * (j * (n + 1.0)).max(1e-300));
    }

    #[test]
    fn heating_only_adds_weight(f in family(), t in 1.0f64..500.0, dt in 1.0f64..500.0, x in -1.0f64..1.0) {
        let bare = SpectralDensity::new(f, 1000.0).unwrap();
        let w = 1000.0 * x;
        let cold = bare.at_temperature(t).unwrap().eval(w);
        let warm = bare.at_temperature(t + dt).unwrap().eval(w);
        prop_assert!(warm >= cold * (1.0 - 1e-12));
    }

    #[test]
    fn coupling_scales_quadratically(f in family(), k in 0.1f64..10.0, t in 0.0f64..500.0, x in -1.0f64..1.0) {
        let sd = SpectralDensity::new(f, 1000.0).unwrap().at_temperature(t).unwrap();
        let w = 1000.0 * x;
        let scaled = sd.with_lambda_scaled(k).eval(w);
        prop_assert!((scaled - k * k * sd.eval(w)).abs() <= 1e-12 * scaled.abs().max(1e-300));
    }
}

#[test]
fn bose_occupation_reference_values() {
    // n(ω) at ω = k_B T is 1/(e - 1).
    let beta = 1.0 / 208.51044;
    assert_relative_eq!(bose_occupation(beta, 208.51044), 1.0 / (std::f64::consts::E - 1.0), max_relative = 1e-14);
}
