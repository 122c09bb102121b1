//! Wavefront of a single excitation injected at site 1: it moves at
//! 2 kappa_inf, and thermalization doubles kappa_inf by doubling the support.
//!
//!     cargo run --release --example light_cone

use chainmapper::chainmap::{asymptotic_limits, chain_for, lightcone_length};
use chainmapper::single_excitation::*;
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let base = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0)?, 1000.0)?;
    let times = time_grid(0.2, 201);
    let mut speeds = Vec::new();
    for temp in [0.0, 300.0] {
        let sd = base.at_temperature(temp)?;
        let n = lightcone_length(sd.support(), 0.2)?;
        let chain = chain_for(&sd, n, None)?;
        let h = TridiagonalHamiltonian::from_chain(&chain);
        let traj = propagate(&h, &first_site_state(n), &times, false)?;
        let front = front_position(&traj, DEFAULT_FRONT_THRESHOLD);
        let v = front_speed(&traj, DEFAULT_FRONT_THRESHOLD)?;
        let (_, k_inf) = asymptotic_limits(sd.support())?;
        println!("T={temp:>5} K  N={n}  front at t=0.05,0.1,0.2: {:?}", [front[50], front[100], front[200]]);
        println!("           speed {v:.1} sites/time, 2 kappa_inf = {:.1}", 2.0 * k_inf);
        speeds.push(v);
    }
    println!("speed ratio T=300/T=0: {:.3}", speeds[1] / speeds[0]);
    Ok(())
}
