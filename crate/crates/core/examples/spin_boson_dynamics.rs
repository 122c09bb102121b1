//! Unbiased spin-boson dynamics: qubit coherence, chain occupations and
//! truncation diagnostics, then a dt/chi convergence sweep.
//!
//!     cargo run --release --example spin_boson_dynamics [s] [T]

use chainmapper::full_dynamics::*;
use chainmapper::spectral::{Family, SpectralDensity};
use chainmapper::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let s = args.next().unwrap_or(1.0);
    let temp = args.next().unwrap_or(0.0);
    let t_max = 0.02;

    let sd = SpectralDensity::new(Family::ohmic(1.0, s, 100.0)?, 1000.0)?;
    let d = default_fock_dim(&sd.at_temperature(temp)?);
    let model = build_model(&sd, temp, 70.0, t_max, d)?;
    let controls = EvolutionControls {
        stride: 10,
        ..EvolutionControls::new(t_max)
    };
    let rec = evolve(&model, &controls)?;
    println!("s={s} T={temp} K: L={} d={d} kappa0={:.3}", model.sites(), model.chain.kappa0);
    println!("{:>7} {:>10} {:>10} {:>10} {:>10}", "t", "<sx>", "<sz>", "n_1", "sum n");
    for i in 0..rec.times.len() {
        println!(
            "{:>7.4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            rec.times[i],
            rec.sigma_x[i],
            rec.sigma_z[i],
            rec.occupations[i][0],
            rec.occupations[i].iter().sum::<f64>()
        );
    }
    let tr = &rec.truncation;
    println!(
        "max bond {}, max discarded {:.1e}, |norm-1| <= {:.1e}, converged: {}",
        tr.max_bond, tr.max_discarded, tr.max_norm_deviation, !rec.convergence_failure
    );

    // Successive runs are compared, so the base run sits in the middle.
    let report = convergence_sweep(&model, &controls, &[Refinement::dt(0.5), Refinement::BASE, Refinement::chi(2)])?;
    for (what, dev) in ["halving dt", "doubling chi_max"].iter().zip(&report.deviations) {
        println!("{what}: max |d<sx>| {:.2e}, max |d n_1| {:.2e}", dev.sigma_x, dev.n1);
    }
    Ok(())
}
