//! Fraction of the single excitation left on the first few sites for
//! sub-Ohmic, Ohmic and super-Ohmic baths.
//!
//!     cargo run --release --example ohmic_localization

use chainmapper::chainmap::{chain_for, lightcone_length};
use chainmapper::single_excitation::*;
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let times = time_grid(0.2, 201);
    println!("{:>5} {:>6} {:>12} {:>12} {:>12}", "s", "T", "k<=1", "k<=3", "k<=10");
    for temp in [0.0, 300.0] {
        for s in [0.5, 1.0, 2.0] {
            let sd = SpectralDensity::new(Family::ohmic(1.0, s, 100.0)?, 1000.0)?.at_temperature(temp)?;
            let n = lightcone_length(sd.support(), 0.2)?;
            let chain = chain_for(&sd, n, None)?;
            let h = TridiagonalHamiltonian::from_chain(&chain);
            let traj = propagate(&h, &first_site_state(n), &times, false)?;
            let f = |k| localization_fraction(&traj, k, 0.2);
            println!("{s:>5} {temp:>6} {:>12.4e} {:>12.4e} {:>12.4e}", f(1), f(3), f(10));
        }
    }
    Ok(())
}
