//! Maps an Ohmic bath onto a chain and checks the coefficients approach
//! the support-determined limits; the thermal chain spans [-hc, hc].
//!
//!     cargo run --example chain_coefficients

use chainmapper::chainmap::{asymptotic_limits, chain_for, lightcone_length, ChainCoefficients};
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn show(label: &str, c: &ChainCoefficients) -> Result<()> {
    let (w_inf, k_inf) = asymptotic_limits(c.support)?;
    println!("{label}: kappa0 = {:.6}, limits omega -> {w_inf}, kappa -> {k_inf}", c.kappa0);
    for n in [1, 2, 5, 10, 20, 40, 60] {
        println!("  n={n:>3}  omega_n={:>10.4}  kappa_n={:>10.4}", c.omegas[n - 1], c.kappas[n - 1]);
    }
    Ok(())
}

fn main() -> Result<()> {
    let sd = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0)?, 1000.0)?;
    let cold = chain_for(&sd, 61, Some(400))?;
    show("T = 0", &cold)?;
    let hot = chain_for(&sd.at_temperature(300.0)?, 61, Some(400))?;
    show("T = 300 K", &hot)?;

    for t in [0.05, 0.2] {
        println!(
            "sites needed up to t = {t}: {} (T=0), {} (T=300 K)",
            lightcone_length(cold.support, t)?,
            lightcone_length(hot.support, t)?
        );
    }

    let json = cold.to_json()?;
    assert_eq!(ChainCoefficients::from_json(&json)?, cold);
    println!("JSON round trip exact ({} bytes)", json.len());
    Ok(())
}
