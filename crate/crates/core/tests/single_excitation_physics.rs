use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use chainmapper::chainmap::chain_for;
use chainmapper::single_excitation::*;
use chainmapper::spectral::{Family, SpectralDensity};

fn uniform(n: usize, omega: f64, kappa: f64) -> TridiagonalHamiltonian {
    TridiagonalHamiltonian::new(vec![omega; n], vec![kappa; n - 1]).unwrap()
}

/// J_1(z) from its integral representation; the integrand is periodic, so
/// the trapezoid rule converges exponentially.
fn bessel_j1(z: f64) -> f64 {
    let n = 512;
    let h = PI / n as f64;
    let s: f64 = (0..n)
        .map(|k| {
            let tau = (k as f64 + 0.5) * h;
            (tau - z * tau.sin()).cos()
        })
        .sum();
    s * h / PI
}

#[test]
fn semi_infinite_uniform_chain_follows_bessel_law() {
    // p_1(t) = (J_1(2κt)/(κt))² until the front returns from the far end.
    let kappa = 50.0;
    let h = uniform(400, 300.0, kappa);
    let times = time_grid(1.0, 101);
    let traj = propagate(&h, &first_site_state(400), &times, false).unwrap();
    for (t, row) in times.iter().zip(&traj.populations).skip(1) {
        let z = kappa * t;
        let exact = (bessel_j1(2.0 * z) / z).powi(2);
        assert_abs_diff_eq!(row[0], exact, epsilon = 1e-12);
    }
    assert!(!traj.truncation_warning);
}

#[test]
fn finite_uniform_chain_matches_standing_waves() {
    let (n, omega, kappa) = (17usize, 2.0, 1.3);
    let h = uniform(n, omega, kappa);
    let times = time_grid(6.0, 25);
    let traj = propagate(&h, &first_site_state(n), &times, true).unwrap();
    let amps = traj.amplitudes.unwrap();
    let q = PI / (n + 1) as f64;
    for (t, row) in times.iter().zip(&amps) {
        for x in 1..=n {
            let a: Complex64 = (1..=n)
                .map(|k| {
                    let e = omega + 2.0 * kappa * (k as f64 * q).cos();
                    let w = 2.0 / (n + 1) as f64 * (k as f64 * q).sin() * (k as f64 * x as f64 * q).sin();
                    Complex64::from_polar(w, -e * t)
                })
                .sum();
            assert!((row[x - 1] - a).norm() < 1e-12, "t={t} x={x}");
        }
    }
}

#[test]
fn wavefront_respects_the_light_cone() {
    // Amplitude beyond x ≈ 2κt·e is super-exponentially small.
    let kappa = 10.0;
    let h = uniform(300, 0.0, kappa);
    let times = time_grid(5.0, 11);
    let traj = propagate(&h, &first_site_state(300), &times, false).unwrap();
    for (t, row) in times.iter().zip(&traj.populations) {
        let edge = (2.0 * kappa * t * std::f64::consts::E).ceil() as usize + 10;
        let outside: f64 = row.iter().skip(edge).sum();
        assert!(outside < 1e-12, "t={t}: {outside:e}");
    }
}

#[test]
fn subohmic_chains_hold_the_excitation_longer() {
    let run = |s: f64| {
        let sd = SpectralDensity::new(Family::ohmic(1.0, s, 100.0).unwrap(), 1000.0).unwrap();
        let chain = chain_for(&sd, 125, None).unwrap();
        let h = TridiagonalHamiltonian::from_chain(&chain);
        let traj = propagate(&h, &first_site_state(h.len()), &time_grid(0.2, 41), false).unwrap();
        localization_fraction(&traj, 5, 0.2)
    };
    assert!(run(0.5) > 2.0 * run(2.0));
}

fn random_chain() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..24).prop_flat_map(|n| {
        (
            prop::collection::vec(-50.0f64..50.0, n),
            prop::collection::vec(0.1f64..30.0, n - 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_is_unitary_and_conserves_energy((d, o) in random_chain(), t in 0.0f64..3.0) {
        let h = TridiagonalHamiltonian::new(d, o).unwrap();
        let psi0 = first_site_state(h.len());
        let prop = h.propagator();
        let psi = prop.evolve(&psi0, t);
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!((h.energy(&psi) - h.energy(&psi0)).abs() < 1e-9 * (1.0 + h.energy(&psi0).abs()));
    }

    #[test]
    fn backward_evolution_returns_the_initial_state((d, o) in random_chain(), t in 0.0f64..3.0) {
        let h = TridiagonalHamiltonian::new(d, o).unwrap();
        let psi0 = first_site_state(h.len());
        let prop = h.propagator();
        let back = prop.evolve(&prop.evolve(&psi0, t), -t);
        for (a, b) in back.iter().zip(&psi0) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}
