//! Pure dephasing (Delta = 0) with the MPS engine against the exact
//! coherence exp(-int J (1 - cos wt)/w^2).
//!
//!     cargo run --release --example independent_boson_check

use chainmapper::chainmap::chain_for;
use chainmapper::full_dynamics::*;
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let sd = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0)?, 1000.0)?;
    let model = SpinBosonModel::new(0.0, chain_for(&sd, 60, None)?, 8)?;
    let controls = EvolutionControls {
        chi_max: 32,
        stride: 25,
        ..EvolutionControls::new(0.05)
    };
    let rec = evolve(&model, &controls)?;
    let exact = independent_boson_coherence(&sd, &rec.times)?;
    println!("{:>8} {:>12} {:>12} {:>10}", "t", "MPS", "exact", "error");
    for ((t, a), b) in rec.times.iter().zip(rec.coherence()).zip(&exact) {
        println!("{t:>8.4} {a:>12.8} {b:>12.8} {:>10.2e}", (a - b).abs());
    }
    println!("max bond {}, max discarded {:.1e}", rec.truncation.max_bond, rec.truncation.max_discarded);
    Ok(())
}
