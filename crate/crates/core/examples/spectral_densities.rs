//! Evaluates Lorentzian and Ohmic densities, their thermal versions, and
//! picks a hard cutoff from the neglected reorganization energy.
//!
//!     cargo run --example spectral_densities

use chainmapper::spectral::{choose_hard_cutoff, reorganization_tail_ratio, Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let lor = SpectralDensity::new(Family::lorentzian(60.0, 10.0, 100.0)?, 1000.0)?;
    let ohm = SpectralDensity::new(Family::ohmic(1.0, 0.5, 100.0)?, 1000.0)?;

    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "omega", "J_lor", "J_lor(300K)", "J_ohm", "J_ohm(300K)");
    let (lor_hot, ohm_hot) = (lor.at_temperature(300.0)?, ohm.at_temperature(300.0)?);
    for w in [-300.0, -100.0, -10.0, -1.0, 1.0, 10.0, 100.0, 300.0, 900.0] {
        println!(
            "{w:>8} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            lor.eval(w),
            lor_hot.eval(w),
            ohm.eval(w),
            ohm_hot.eval(w)
        );
    }

    // Emission minus absorption recovers the bare density.
    let w = 150.0;
    println!(
        "\ndetailed balance at {w}: J_b(w) - J_b(-w) = {:.12e}, J(w) = {:.12e}",
        ohm_hot.eval(w) - ohm_hot.eval(-w),
        ohm.eval(w)
    );

    let s1 = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0)?, 1.0)?;
    let hc = choose_hard_cutoff(&s1, 1e-4)?;
    println!(
        "Ohmic s=1: hard cutoff {hc:.1} leaves {:.2e} of the reorganization energy",
        reorganization_tail_ratio(&s1, hc)?
    );
    Ok(())
}
