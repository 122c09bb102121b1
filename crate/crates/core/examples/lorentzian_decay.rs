//! Single-excitation decay of the first chain site for Lorentzian baths:
//! p_1(t) falls as exp(-2 gamma t), slower for narrower peaks.
//!
//!     cargo run --release --example lorentzian_decay

use chainmapper::chainmap::{chain_for, lightcone_length};
use chainmapper::single_excitation::*;
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let times = time_grid(0.2, 201);
    for gamma in [0.001, 1.0, 10.0] {
        let sd = SpectralDensity::new(Family::lorentzian(60.0, gamma, 100.0)?, 1000.0)?;
        let n = lightcone_length(sd.support(), 0.2)?;
        let chain = chain_for(&sd, n, None)?;
        let h = TridiagonalHamiltonian::from_chain(&chain);
        let traj = propagate(&h, &first_site_state(n), &times, false)?;
        let p1 = traj.site_series(1);
        let window = default_decay_window(gamma, &times);
        let fit = fit_decay_rate(&times, &p1, window)?;
        let beat = beating_frequency(&times, &traj.site_series(2));
        println!(
            "gamma={gamma:<6} N={n} p1(0.05)={:.4} p1(0.2)={:.4} fitted rate {fit:.4} beating {}",
            p1[50],
            p1[200],
            beat.map_or("-".into(), |b| format!("{b:.1}"))
        );
    }
    Ok(())
}
