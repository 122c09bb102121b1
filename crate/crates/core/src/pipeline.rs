//! Runs a [`RunConfig`] end to end and writes its artifacts.
//!
//! Every run writes `<mode>-<label>-<hash>.csv` and/or `.json` plus a
//! `.manifest.json` recording the config, all resolved defaults and the
//! run's diagnostics. The hash is taken over the config's TOML form, so
//! identical configs map to identical file names, and the outputs contain
//! no timestamps: reruns are byte-identical.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::chainmap::{chain_for, ChainCoefficients};
use crate::config::{Format, Mode, ResolvedRun, RunConfig};
use crate::error::{Error, Result};
use crate::full_dynamics::{evolve, SpinBosonModel};
use crate::io::{artifact_path, format_float, short_hash, write_atomic};
use crate::single_excitation::{first_site_state, propagate, time_grid, TridiagonalHamiltonian};
use crate::spectral::reorganization_tail_ratio;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub hash: String,
    /// One line per pipeline stage.
    pub summary: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    mode: &'a str,
    label: &'a str,
    hash: &'a str,
    formats: &'a [Format],
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn put(&mut self, ext: &str, bytes: &[u8]) -> Result<PathBuf> {
        let p = artifact_path(self.dir, self.mode, self.label, self.hash, ext);
        write_atomic(&p, bytes)?;
        self.written.push(p.clone());
        Ok(p)
    }
}

fn to_json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Serialization(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Executes `cfg`, writing artifacts under `out` (or the config's output
/// directory).
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutcome> {
    let resolved = cfg.resolve()?;
    let text = cfg.to_toml()?;
    let hash = short_hash(text.as_bytes());
    let dir = out.unwrap_or(&cfg.output.directory);
    let mut w = Writer {
        dir,
        mode: resolved.mode.as_str(),
        label: &resolved.label,
        hash: &hash,
        formats: &cfg.output.formats,
        written: Vec::new(),
    };
    let sd = &resolved.spectral;
    let (lo, hi) = sd.support();
    let mut summary = vec![format!(
        "spectral: {} T={} K hard_cutoff={} support=[{lo}, {hi}]",
        sd.family().name(),
        sd.temperature_k(),
        sd.hard_cutoff()
    )];

    let results = match resolved.mode {
        Mode::ThermalizeInspect => inspect(&resolved, &mut w, &mut summary)?,
        Mode::Coeffs => {
            let chain = chain_stage(&resolved, &mut summary)?;
            coeffs(&chain, &mut w, &mut summary)?
        }
        Mode::Single => {
            let chain = chain_stage(&resolved, &mut summary)?;
            single(&resolved, &chain, &mut w, &mut summary)?
        }
        Mode::Full => full(&resolved, &mut w, &mut summary)?,
    };

    let manifest = json!({
        "version": MANIFEST_VERSION,
        "generator": format!("chainmapper {}", env!("CARGO_PKG_VERSION")),
        "config_hash": hash,
        "config": cfg,
        "resolved": resolved,
        "results": results,
        "artifacts": w.written.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    if w.wants(Format::Json) {
        let p = w.put("manifest.json", &to_json_bytes(&manifest)?)?;
        summary.push(format!("wrote {}", p.display()));
    }
    let artifacts = w.written;
    Ok(RunOutcome {
        label: resolved.label.clone(),
        hash,
        summary,
        artifacts,
    })
}

fn chain_stage(r: &ResolvedRun, summary: &mut Vec<String>) -> Result<ChainCoefficients> {
    let n = r.n.expect("resolved for chain modes");
    let chain = chain_for(&r.spectral, n, r.m)?;
    summary.push(format!(
        "chain: N={n} M={} kappa0={:.6} omega_N={:.6} kappa_N-1={:.6}",
        chain.metadata.node_count,
        chain.kappa0,
        chain.omegas[n - 1],
        chain.kappas.last().copied().unwrap_or(f64::NAN)
    ));
    Ok(chain)
}

fn coeffs(
    chain: &ChainCoefficients,
    w: &mut Writer,
    summary: &mut Vec<String>,
) -> Result<serde_json::Value> {
    if w.wants(Format::Json) {
        let p = w.put("json", format!("{}\n", chain.to_json()?).as_bytes())?;
        summary.push(format!("wrote {}", p.display()));
    }
    if w.wants(Format::Csv) {
        let mut out = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        out.write_record(["n", "omega_n", "kappa_n"]).map_err(ser)?;
        for (i, om) in chain.omegas.iter().enumerate() {
            let k = chain.kappas.get(i).map(|&k| format_float(k)).unwrap_or_default();
            out.write_record([(i + 1).to_string(), format_float(*om), k]).map_err(ser)?;
        }
        let bytes = out.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        let p = w.put("csv", &bytes)?;
        summary.push(format!("wrote {}", p.display()));
    }
    Ok(json!({ "kappa0": chain.kappa0, "sites": chain.len(), "node_count": chain.metadata.node_count }))
}

fn single(
    r: &ResolvedRun,
    chain: &ChainCoefficients,
    w: &mut Writer,
    summary: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let times = time_grid(r.t_max.expect("resolved"), r.n_times.expect("resolved"));
    let h = TridiagonalHamiltonian::from_chain(chain);
    let traj = propagate(&h, &first_site_state(h.len()), &times, false)?;
    let norm_dev = traj
        .populations
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    summary.push(format!(
        "single: {} samples on [0, {}], p_1(t_max)={:.6e}, max |sum p - 1|={norm_dev:.2e}, edge population {:.2e}{}",
        times.len(),
        times[times.len() - 1],
        traj.populations[times.len() - 1][0],
        traj.max_edge_population,
        if traj.truncation_warning { " (front reached chain end)" } else { "" }
    ));
    if traj.truncation_warning {
        log::warn!("wavepacket reached the end of the {}-site chain", h.len());
    }
    if w.wants(Format::Csv) {
        let mut buf = Vec::new();
        traj.write_csv(&mut buf)?;
        let p = w.put("csv", &buf)?;
        summary.push(format!("wrote {}", p.display()));
    }
    Ok(json!({
        "kappa0": chain.kappa0,
        "max_norm_deviation": norm_dev,
        "max_edge_population": traj.max_edge_population,
        "truncation_warning": traj.truncation_warning,
    }))
}

fn full(r: &ResolvedRun, w: &mut Writer, summary: &mut Vec<String>) -> Result<serde_json::Value> {
    let controls = r.controls.expect("resolved");
    // chain.n defaults to the light-cone length for t_max.
    let chain = chain_for(&r.spectral, r.n.expect("resolved"), r.m)?;
    let model = SpinBosonModel::new(r.delta.expect("resolved"), chain, r.fock_dim.expect("resolved"))?;
    summary.push(format!(
        "chain: L={} kappa0={:.6} fock_dim={}",
        model.sites(),
        model.chain.kappa0,
        model.fock_dim
    ));
    let rec = evolve(&model, &controls)?;
    let last = rec.times.len() - 1;
    summary.push(format!(
        "full: {} steps, sigma_x(t_max)={:.6}, max bond {}, max discarded weight {:.2e}{}",
        rec.truncation.step_discarded.len(),
        rec.sigma_x[last],
        rec.truncation.max_bond,
        rec.truncation.max_discarded,
        if rec.convergence_failure { " (NOT CONVERGED: raise chi_max)" } else { "" }
    ));
    if w.wants(Format::Csv) {
        let mut buf = Vec::new();
        rec.write_csv(&mut buf)?;
        let p = w.put("csv", &buf)?;
        summary.push(format!("wrote {}", p.display()));
    }
    rec.manifest(&model)
}

fn inspect(r: &ResolvedRun, w: &mut Writer, summary: &mut Vec<String>) -> Result<serde_json::Value> {
    let sd = &r.spectral;
    let bare = sd.at_temperature(0.0)?;
    let points = r.inspect_points.expect("resolved");
    let (lo, hi) = sd.support();
    let ratio = reorganization_tail_ratio(&bare, sd.hard_cutoff())?;
    let peaks: Vec<f64> = sd.peaks().iter().map(|p| p.0).collect();
    summary.push(format!(
        "inspect: {points} points on [{lo}, {hi}], neglected reorganization fraction {ratio:.3e}"
    ));
    if w.wants(Format::Csv) {
        let mut out = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        out.write_record(["omega", "J", "J_beta"]).map_err(ser)?;
        for i in 0..points {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            out.write_record([format_float(x), format_float(bare.eval(x)), format_float(sd.eval(x))])
                .map_err(ser)?;
        }
        let bytes = out.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        let p = w.put("csv", &bytes)?;
        summary.push(format!("wrote {}", p.display()));
    }
    Ok(json!({
        "support": [lo, hi],
        "reorganization_tail_ratio": ratio,
        "peak_centers": peaks,
    }))
}

/// Runs independent configs on a pool of `jobs` threads; results are
/// returned in input order.
pub fn run_all(configs: &[RunConfig], out: Option<&Path>, jobs: usize) -> Result<Vec<Result<RunOutcome>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} jobs: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(|c| run(c, out)).collect()))
}
