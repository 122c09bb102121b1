//! Spin-boson dynamics on the chain-mapped environment.
//!
//! The qubit (H_S = Δσ_x, coupled through A_S = (1+σ_z)/2 to site 1) is
//! site 0 of an open chain whose remaining L sites are truncated Fock
//! spaces. The state is a matrix-product state evolved by a symmetric
//! second-order Trotter sweep of two-site gates (left to right with dt/2,
//! then right to left with dt/2), which keeps the orthogonality center on
//! the qubit at every observation.
//!
//! Conventions: σ_z = diag(1, −1) in the basis (|↑⟩, |↓⟩), so
//! A_S = |↑⟩⟨↑|, and |+⟩ = (|↑⟩ + |↓⟩)/√2.

mod mps;

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chainmap::{chain_for, lightcone_length, ChainCoefficients};
use crate::error::{Error, Result};
use crate::io::format_float;
use crate::quad::{integrate, Tolerance};
use crate::spectral::{Family, SpectralDensity};

use mps::{gate, sparse, Mps, SparseOp, Truncation};

pub const DEFAULT_DT: f64 = 2e-4;
pub const DEFAULT_CHI_MAX: usize = 64;
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-10;
pub const DEFAULT_STRIDE: usize = 5;
pub const DEFAULT_FOCK_DIM: usize = 8;
/// Fock dimension for sub-Ohmic baths at finite temperature, whose first
/// sites accumulate many quanta.
pub const SUBOHMIC_THERMAL_FOCK_DIM: usize = 12;
/// Discarded weight, relative to `svd_cutoff`, beyond which a run is
/// flagged as not converged.
pub const FAILURE_FACTOR: f64 = 100.0;
/// Excited weight below which an untouched site counts as vacuum.
const VACUUM_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemState {
    Plus,
    Up,
    Down,
}

impl SystemState {
    fn vector(self) -> Vec<Complex64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            SystemState::Plus => vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
            SystemState::Up => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            SystemState::Down => vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }
}

/// System operator coupled to site 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// A_S = (1 + σ_z)/2.
    UpProjector,
}

impl Coupling {
    fn matrix(self) -> DMatrix<f64> {
        match self {
            Coupling::UpProjector => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        }
    }
}

/// Initial state of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainState {
    Vacuum,
    /// One quantum on the given site (1-based).
    Excitation(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinBosonModel {
    pub delta: f64,
    pub chain: ChainCoefficients,
    pub coupling: Coupling,
    pub system_state: SystemState,
    pub chain_state: ChainState,
    pub fock_dim: usize,
}

impl SpinBosonModel {
    pub fn new(delta: f64, chain: ChainCoefficients, fock_dim: usize) -> Result<Self> {
        let model = SpinBosonModel {
            delta,
            chain,
            coupling: Coupling::UpProjector,
            system_state: SystemState::Plus,
            chain_state: ChainState::Vacuum,
            fock_dim,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() {
            return Err(Error::parameter("dynamics.delta", format!("must be finite, got {}", self.delta)));
        }
        if self.fock_dim < 2 {
            return Err(Error::parameter(
                "dynamics.fock_dim",
                format!("must be at least 2, got {}", self.fock_dim),
            ));
        }
        if self.chain.is_empty() {
            return Err(Error::parameter("chain.n", "chain has no sites"));
        }
        if let ChainState::Excitation(site) = self.chain_state {
            if site == 0 || site > self.chain.len() {
                return Err(Error::parameter(
                    "chain_state",
                    format!("excitation site {site} outside 1..={}", self.chain.len()),
                ));
            }
        }
        Ok(())
    }

    /// Chain length L.
    pub fn sites(&self) -> usize {
        self.chain.len()
    }

    pub fn with_fock_dim(&self, fock_dim: usize) -> Result<Self> {
        let m = SpinBosonModel { fock_dim, ..self.clone() };
        m.validate()?;
        Ok(m)
    }

    fn bond_hamiltonian(&self, k: usize) -> DMatrix<f64> {
        let d = self.fock_dim;
        let (b, n) = (annihilation(d), number(d));
        let id = DMatrix::<f64>::identity(d, d);
        if k == 0 {
            let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
            let x = &b + b.transpose();
            self.delta * sx.kronecker(&id)
                + self.chain.kappa0 * self.coupling.matrix().kronecker(&x)
                + self.chain.omegas[0] * DMatrix::<f64>::identity(2, 2).kronecker(&n)
        } else {
            let hop = b.transpose().kronecker(&b) + b.kronecker(&b.transpose());
            self.chain.kappas[k - 1] * hop + self.chain.omegas[k] * id.kronecker(&n)
        }
    }
}

fn annihilation(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

fn number(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if i == j { i as f64 } else { 0.0 })
}

/// Fock dimension used when none is given: larger for sub-Ohmic baths at
/// finite temperature.
pub fn default_fock_dim(sd: &SpectralDensity) -> usize {
    match sd.family() {
        Family::Ohmic { s, .. } if *s < 1.0 && sd.is_thermal() => SUBOHMIC_THERMAL_FOCK_DIM,
        _ => DEFAULT_FOCK_DIM,
    }
}

/// Thermalizes `sd` at `temperature_k`, maps it onto a chain long enough
/// for the light cone up to `t_max`, and assembles the model.
pub fn build_model(
    sd: &SpectralDensity,
    temperature_k: f64,
    delta: f64,
    t_max: f64,
    fock_dim: usize,
) -> Result<SpinBosonModel> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::parameter("dynamics.t_max", format!("must be positive, got {t_max}")));
    }
    let sd = sd.at_temperature(temperature_k)?;
    let l = lightcone_length(sd.support(), t_max)?;
    let chain = chain_for(&sd, l, None)?;
    SpinBosonModel::new(delta, chain, fock_dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionControls {
    pub dt: f64,
    pub t_max: f64,
    pub chi_max: usize,
    pub svd_cutoff: f64,
    /// Observables are recorded every `stride` steps.
    pub stride: usize,
}

impl EvolutionControls {
    pub fn new(t_max: f64) -> Self {
        EvolutionControls {
            dt: DEFAULT_DT,
            t_max,
            chi_max: DEFAULT_CHI_MAX,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
            stride: DEFAULT_STRIDE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = "dynamics.controls";
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::parameter(format!("{p}.dt"), format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::parameter("dynamics.t_max", format!("must be positive, got {}", self.t_max)));
        }
        if self.chi_max < 2 {
            return Err(Error::parameter(
                format!("{p}.chi_max"),
                format!("must be at least 2, got {}", self.chi_max),
            ));
        }
        if !(self.svd_cutoff > 0.0 && self.svd_cutoff <= 1e-4) {
            return Err(Error::parameter(
                format!("{p}.svd_cutoff"),
                format!("must lie in (0, 1e-4], got {}", self.svd_cutoff),
            ));
        }
        if self.stride == 0 {
            return Err(Error::parameter(format!("{p}.stride"), "must be at least 1"));
        }
        Ok(())
    }

    /// Number of Trotter steps covering [0, t_max].
    pub fn steps(&self) -> usize {
        let n = self.t_max / self.dt;
        let r = n.round();
        if (n - r).abs() < 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationLog {
    /// Largest relative discarded weight of any bond update, per step.
    pub step_discarded: Vec<f64>,
    pub max_discarded: f64,
    pub total_discarded: f64,
    pub max_bond: usize,
    /// Largest |‖θ‖² − 1| seen before renormalizing a two-site block.
    pub max_norm_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullDynamicsRecord {
    pub times: Vec<f64>,
    pub sigma_x: Vec<f64>,
    pub sigma_y: Vec<f64>,
    pub sigma_z: Vec<f64>,
    /// `occupations[i][k-1]` = n_k(t_i).
    pub occupations: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    /// ⟨ψ|ψ⟩ at each recorded time.
    pub norm: Vec<f64>,
    pub truncation: TruncationLog,
    /// Set when some update discarded more than FAILURE_FACTOR·svd_cutoff.
    pub convergence_failure: bool,
    pub controls: EvolutionControls,
}

impl FullDynamicsRecord {
    /// |⟨σ_x⟩ + i⟨σ_y⟩| = 2|ρ_↑↓|.
    pub fn coherence(&self) -> Vec<f64> {
        self.sigma_x
            .iter()
            .zip(&self.sigma_y)
            .map(|(x, y)| x.hypot(*y))
            .collect()
    }

    pub fn sites(&self) -> usize {
        self.occupations.first().map_or(0, Vec::len)
    }

    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &x) in self.times.iter().enumerate() {
            if (x - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    /// n_k(t) for site `k` (1-based) across the record.
    pub fn site_series(&self, k: usize) -> Vec<f64> {
        self.occupations.iter().map(|row| row[k - 1]).collect()
    }

    /// Eigenvalues of the reduced qubit state at record index `i`.
    pub fn reduced_eigenvalues(&self, i: usize) -> (f64, f64) {
        let r = (self.sigma_x[i].powi(2) + self.sigma_y[i].powi(2) + self.sigma_z[i].powi(2)).sqrt();
        (0.5 * (1.0 - r), 0.5 * (1.0 + r))
    }

    /// CSV with header `t,sigma_x,n_1,…,n_L`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        let mut header = vec!["t".to_string(), "sigma_x".to_string()];
        header.extend((1..=self.sites()).map(|k| format!("n_{k}")));
        w.write_record(&header).map_err(ser)?;
        for i in 0..self.times.len() {
            let mut rec = vec![format_float(self.times[i]), format_float(self.sigma_x[i])];
            rec.extend(self.occupations[i].iter().map(|&n| format_float(n)));
            w.write_record(&rec).map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Run manifest: every model and control parameter plus truncation
    /// diagnostics.
    pub fn manifest(&self, model: &SpinBosonModel) -> Result<serde_json::Value> {
        let chain: serde_json::Value = serde_json::from_str(&model.chain.to_json()?)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        let t = &self.truncation;
        Ok(serde_json::json!({
            "version": MANIFEST_VERSION,
            "model": {
                "delta": model.delta,
                "coupling": model.coupling,
                "system_state": model.system_state,
                "chain_state": model.chain_state,
                "fock_dim": model.fock_dim,
                "sites": model.sites(),
                "chain": chain,
            },
            "controls": self.controls,
            "diagnostics": {
                "steps": t.step_discarded.len(),
                "recorded_times": self.times.len(),
                "max_discarded_weight": t.max_discarded,
                "total_discarded_weight": t.total_discarded,
                "max_bond_dimension": t.max_bond,
                "max_norm_deviation": t.max_norm_deviation,
                "failure_threshold": FAILURE_FACTOR * self.controls.svd_cutoff,
                "convergence_failure": self.convergence_failure,
                "final_energy": self.energy.last(),
            },
        }))
    }
}

pub const MANIFEST_VERSION: u32 = 1;

/// Row n_k(t) nearest to `t`; logs a warning when `t` is off the grid.
pub fn occupation_profile(record: &FullDynamicsRecord, t: f64) -> Vec<f64> {
    let i = record.nearest_index(t);
    let tol = 1e-9 * record.controls.dt.max(t.abs() * 1e-3);
    if (record.times[i] - t).abs() > tol {
        log::warn!(
            "t = {t} is not on the recorded grid; using nearest sample t = {}",
            record.times[i]
        );
    }
    record.occupations[i].clone()
}

struct Operators {
    b: SparseOp,
    bdag: SparseOp,
    coupling: SparseOp,
}

impl Operators {
    fn new(model: &SpinBosonModel) -> Self {
        let b = annihilation(model.fock_dim);
        Operators {
            bdag: sparse(&b.transpose()),
            b: sparse(&b),
            coupling: sparse(&model.coupling.matrix()),
        }
    }
}

/// Evolves |system⟩ ⊗ |chain⟩ with a symmetric Trotter sweep.
pub fn evolve(model: &SpinBosonModel, controls: &EvolutionControls) -> Result<FullDynamicsRecord> {
    model.validate()?;
    controls.validate()?;
    let l = model.sites();
    let d = model.fock_dim;

    let mut local = vec![model.system_state.vector()];
    for k in 1..=l {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        let q = match model.chain_state {
            ChainState::Excitation(site) if site == k => 1,
            _ => 0,
        };
        v[q] = Complex64::new(1.0, 0.0);
        local.push(v);
    }
    let mut state = Mps::product(&local);
    let gates: Vec<_> = (0..l)
        .map(|k| gate(&model.bond_hamiltonian(k), 0.5 * controls.dt))
        .collect();
    let ops = Operators::new(model);
    let trunc = Truncation {
        chi_max: controls.chi_max,
        cutoff: controls.svd_cutoff,
    };

    let first = match model.chain_state {
        ChainState::Vacuum => 0,
        ChainState::Excitation(site) => site,
    };
    let mut active = l.min(first + 2);

    let steps = controls.steps();
    let mut record = FullDynamicsRecord {
        times: Vec::new(),
        sigma_x: Vec::new(),
        sigma_y: Vec::new(),
        sigma_z: Vec::new(),
        occupations: Vec::new(),
        energy: Vec::new(),
        norm: Vec::new(),
        truncation: TruncationLog {
            max_bond: 1,
            ..TruncationLog::default()
        },
        convergence_failure: false,
        controls: *controls,
    };
    observe(&state, model, &ops, active, 0.0, &mut record);

    for step in 1..=steps {
        let mut worst = 0.0f64;
        let mut track = |u: mps::BondUpdate, log: &mut TruncationLog| {
            worst = worst.max(u.discarded);
            log.total_discarded += u.discarded;
            log.max_bond = log.max_bond.max(u.kept);
            log.max_norm_deviation = log.max_norm_deviation.max((u.norm_sq - 1.0).abs());
        };
        for k in 0..active {
            let u = state.apply_gate(k, &gates[k], trunc, true);
            track(u, &mut record.truncation);
        }
        for k in (0..active).rev() {
            let u = state.apply_gate(k, &gates[k], trunc, false);
            track(u, &mut record.truncation);
        }
        let log = &mut record.truncation;
        log.step_discarded.push(worst);
        log.max_discarded = log.max_discarded.max(worst);
        if worst > FAILURE_FACTOR * controls.svd_cutoff && !record.convergence_failure {
            record.convergence_failure = true;
            log::warn!(
                "discarded weight {worst:e} at step {step} exceeds {:e}; results not converged in chi_max = {}",
                FAILURE_FACTOR * controls.svd_cutoff,
                controls.chi_max
            );
        }

        let last = (1..=active)
            .rev()
            .find(|&k| !state.is_vacuum(k, VACUUM_FLOOR))
            .unwrap_or(0);
        active = active.max(l.min(last + 2));

        if step % controls.stride == 0 || step == steps {
            observe(&state, model, &ops, active, step as f64 * controls.dt, &mut record);
        }
    }
    Ok(record)
}

/// Records observables; the orthogonality center must be on site 0 and
/// sites beyond `active` must be untouched vacuum.
fn observe(
    state: &Mps,
    model: &SpinBosonModel,
    ops: &Operators,
    active: usize,
    t: f64,
    record: &mut FullDynamicsRecord,
) {
    let l = model.sites();
    let envs = state.left_environments(active);
    let rho = state.reduced_origin();
    let sx = 2.0 * rho[(0, 1)].re;
    let sy = -2.0 * rho[(0, 1)].im;
    let sz = (rho[(0, 0)] - rho[(1, 1)]).re;

    let mut occ = vec![0.0; l];
    for k in 1..=active {
        occ[k - 1] = state
            .local_populations(&envs[k], k)
            .iter()
            .enumerate()
            .map(|(q, p)| q as f64 * p)
            .sum();
    }

    let mut energy = model.delta * sx
        + 2.0 * model.chain.kappa0 * state.bond_expect(&envs[0], 0, &ops.coupling, &ops.b).re;
    for k in 1..=active {
        energy += model.chain.omegas[k - 1] * occ[k - 1];
        if k < active {
            energy += 2.0
                * model.chain.kappas[k - 1]
                * state.bond_expect(&envs[k], k, &ops.bdag, &ops.b).re;
        }
    }

    record.times.push(t);
    record.sigma_x.push(sx);
    record.sigma_y.push(sy);
    record.sigma_z.push(sz);
    record.occupations.push(occ);
    record.energy.push(energy);
    record.norm.push(state.norm_sq_at_origin());
}

/// Pure-dephasing coherence |⟨σ_x⟩ + i⟨σ_y⟩| for Δ = 0 and an initial
/// |+⟩ ⊗ vacuum: exp(−∫ J(ω)(1 − cos ωt)/ω² dω) over the support of `sd`
/// (thermalized if it carries a temperature).
pub fn independent_boson_coherence(sd: &SpectralDensity, times: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = sd.support();
    let mut breaks: Vec<f64> = sd.peaks().iter().map(|p| p.0).collect();
    breaks.push(0.0);
    times
        .iter()
        .map(|&t| {
            let f = |w: f64| {
                let x = 0.5 * w * t;
                if x.abs() < 1e-8 {
                    0.5 * t * t * sd.eval(w)
                } else {
                    2.0 * x.sin().powi(2) / (w * w) * sd.eval(w)
                }
            };
            let tol = Tolerance {
                relative: 1e-12,
                absolute: 1e-14,
                ..Tolerance::default()
            };
            Ok((-integrate(f, lo, hi, &breaks, tol)?.value).exp())
        })
        .collect()
}

/// Control scaling for one run of a convergence sweep, relative to the
/// base controls and model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    /// New dt = base dt × dt_factor.
    pub dt_factor: f64,
    /// New χ_max = base χ_max × chi_factor.
    pub chi_factor: usize,
    /// New d = base d + fock_increment.
    pub fock_increment: usize,
}

impl Refinement {
    pub const BASE: Refinement = Refinement {
        dt_factor: 1.0,
        chi_factor: 1,
        fock_increment: 0,
    };

    pub fn dt(factor: f64) -> Self {
        Refinement { dt_factor: factor, ..Self::BASE }
    }

    pub fn chi(factor: usize) -> Self {
        Refinement { chi_factor: factor, ..Self::BASE }
    }

    pub fn fock(increment: usize) -> Self {
        Refinement { fock_increment: increment, ..Self::BASE }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub refinement: Refinement,
    pub controls: EvolutionControls,
    pub fock_dim: usize,
    pub record: FullDynamicsRecord,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub sigma_x: f64,
    pub n1: f64,
    /// Number of common sample times compared.
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub runs: Vec<SweepRun>,
    /// `deviations[i]` compares run i with run i+1.
    pub deviations: Vec<Deviation>,
}

/// Runs `evolve` for each refinement (in parallel) and reports the
/// maximum deviation of ⟨σ_x⟩ and n_1 between successive runs at the
/// sample times they share. The stride is rescaled with dt so that
/// runs sample the same times.
pub fn convergence_sweep(
    model: &SpinBosonModel,
    base: &EvolutionControls,
    refinements: &[Refinement],
) -> Result<ConvergenceReport> {
    let runs: Result<Vec<SweepRun>> = refinements
        .par_iter()
        .map(|r| {
            if !(r.dt_factor > 0.0) || r.chi_factor == 0 {
                return Err(Error::parameter("refinement", format!("invalid scaling {r:?}")));
            }
            let stride = ((base.stride as f64) / r.dt_factor).round().max(1.0) as usize;
            let controls = EvolutionControls {
                dt: base.dt * r.dt_factor,
                chi_max: base.chi_max * r.chi_factor,
                stride,
                ..*base
            };
            let m = model.with_fock_dim(model.fock_dim + r.fock_increment)?;
            let record = evolve(&m, &controls)?;
            Ok(SweepRun {
                refinement: *r,
                controls,
                fock_dim: m.fock_dim,
                record,
            })
        })
        .collect();
    let runs = runs?;
    let deviations = runs
        .windows(2)
        .map(|w| compare(&w[0].record, &w[1].record))
        .collect();
    Ok(ConvergenceReport { runs, deviations })
}

/// Maximum deviations of ⟨σ_x⟩ and n_1 at shared sample times.
pub fn compare(a: &FullDynamicsRecord, b: &FullDynamicsRecord) -> Deviation {
    let mut dev = Deviation {
        sigma_x: 0.0,
        n1: 0.0,
        samples: 0,
    };
    let tol = 1e-6 * a.controls.dt.min(b.controls.dt);
    let mut j = 0;
    for (i, &t) in a.times.iter().enumerate() {
        while j < b.times.len() && b.times[j] < t - tol {
            j += 1;
        }
        if j < b.times.len() && (b.times[j] - t).abs() <= tol {
            dev.sigma_x = dev.sigma_x.max((a.sigma_x[i] - b.sigma_x[j]).abs());
            dev.n1 = dev.n1.max((a.occupations[i][0] - b.occupations[j][0]).abs());
            dev.samples += 1;
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainmap::ChainMetadata;

    fn toy_chain(kappa0: f64, l: usize) -> ChainCoefficients {
        ChainCoefficients {
            kappa0,
            omegas: vec![10.0; l],
            kappas: vec![4.0; l - 1],
            support: (0.0, 20.0),
            temperature_k: 0.0,
            metadata: ChainMetadata::default(),
        }
    }

    #[test]
    fn operators_have_expected_matrix_elements() {
        let b = annihilation(4);
        assert_eq!(b[(0, 1)], 1.0);
        assert!((b[(2, 3)] - 3f64.sqrt()).abs() < 1e-15);
        let n = b.transpose() * &b;
        assert!((n - number(4)).norm() < 1e-14);
    }

    #[test]
    fn decoupled_qubit_is_stationary() {
        let model = SpinBosonModel::new(5.0, toy_chain(0.0, 6), 4).unwrap();
        let mut c = EvolutionControls::new(0.5);
        c.dt = 1e-2;
        let rec = evolve(&model, &c).unwrap();
        for i in 0..rec.times.len() {
            assert!((rec.sigma_x[i] - 1.0).abs() < 1e-12);
            assert!(rec.occupations[i].iter().all(|n| n.abs() < 1e-14));
        }
        assert!(!rec.convergence_failure);
    }

    #[test]
    fn invalid_controls_name_their_path() {
        let mut c = EvolutionControls::new(1.0);
        c.svd_cutoff = 1e-3;
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("dynamics.controls.svd_cutoff"), "{e}");
        c = EvolutionControls::new(1.0);
        c.chi_max = 1;
        assert!(c.validate().unwrap_err().to_string().contains("chi_max"));
        assert!(SpinBosonModel::new(1.0, toy_chain(1.0, 3), 1).is_err());
        assert!(SpinBosonModel::new(f64::NAN, toy_chain(1.0, 3), 4)
            .unwrap_err()
            .to_string()
            .contains("dynamics.delta"));
    }

    #[test]
    fn step_count_tolerates_rounding() {
        let mut c = EvolutionControls::new(0.05);
        c.dt = 2e-4;
        assert_eq!(c.steps(), 250);
        c.t_max = 0.05001;
        assert_eq!(c.steps(), 251);
    }

    #[test]
    fn energy_is_conserved_for_small_steps() {
        let model = SpinBosonModel::new(3.0, toy_chain(2.0, 5), 5).unwrap();
        let mut c = EvolutionControls::new(1.0);
        c.dt = 2e-3;
        c.stride = 50;
        let rec = evolve(&model, &c).unwrap();
        let e0 = rec.energy[0];
        for (e, n) in rec.energy.iter().zip(&rec.norm) {
            assert!((e - e0).abs() < 1e-4 * e0.abs().max(1.0), "{e} vs {e0}");
            assert!((n - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_header_lists_sites() {
        let model = SpinBosonModel::new(1.0, toy_chain(1.0, 3), 3).unwrap();
        let mut c = EvolutionControls::new(0.02);
        c.dt = 1e-2;
        c.stride = 1;
        let rec = evolve(&model, &c).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,sigma_x,n_1,n_2,n_3\n"));
        assert_eq!(text.lines().count(), 4);
        let m = rec.manifest(&model).unwrap();
        assert_eq!(m["model"]["fock_dim"], 3);
        assert_eq!(m["diagnostics"]["steps"], 2);
    }
}
