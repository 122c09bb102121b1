//! Single-excitation transport on the chain (κ0 = 0 sector).
//!
//! In the basis {|x⟩} of one quantum on site x the chain Hamiltonian is
//! the symmetric tridiagonal matrix with diagonal ω_n and off-diagonal
//! κ_n. Propagation uses its full eigendecomposition, so results are
//! exact to rounding at every requested time.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::chainmap::{ChainCoefficients, DiscretizedMeasure};
use crate::error::{Error, Result};
use crate::io::format_float;

/// Population above which the last site counts as reached by the front.
pub const EDGE_POPULATION_LIMIT: f64 = 1e-8;
/// Default front threshold relative to the instantaneous maximum.
pub const DEFAULT_FRONT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::parameter("diag", "empty Hamiltonian"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::parameter(
                "offdiag",
                format!("expected {} entries, got {}", diag.len() - 1, offdiag.len()),
            ));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag })
    }

    pub fn from_chain(chain: &ChainCoefficients) -> Self {
        TridiagonalHamiltonian {
            diag: chain.omegas.clone(),
            offdiag: chain.kappas.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &k) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = k;
            m[(i + 1, i)] = k;
        }
        m
    }

    /// H·ψ.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = psi[i] * self.diag[i];
                if i > 0 {
                    v += psi[i - 1] * self.offdiag[i - 1];
                }
                if i + 1 < n {
                    v += psi[i + 1] * self.offdiag[i];
                }
                v
            })
            .collect()
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        self.apply(psi)
            .iter()
            .zip(psi)
            .map(|(h, p)| (p.conj() * h).re)
            .sum()
    }

    /// Eigen-decomposed propagator for repeated use.
    pub fn propagator(&self) -> Propagator {
        let eig = SymmetricEigen::new(self.dense());
        Propagator {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }
}

/// exp(−iHt) through the eigenbasis of H.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Propagator {
    pub fn energies(&self) -> &[f64] {
        self.energies.as_slice()
    }

    fn project(&self, psi0: &[Complex64]) -> Vec<Complex64> {
        let n = self.energies.len();
        (0..n)
            .map(|k| {
                self.vectors
                    .column(k)
                    .iter()
                    .zip(psi0)
                    .map(|(v, p)| p * v)
                    .sum()
            })
            .collect()
    }

    /// ψ(t) = exp(−iHt)ψ0.
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
        let c = self.project(psi0);
        self.evolve_projected(&c, t)
    }

    fn evolve_projected(&self, c: &[Complex64], t: f64) -> Vec<Complex64> {
        let (re, im): (Vec<f64>, Vec<f64>) = c
            .iter()
            .zip(self.energies.iter())
            .map(|(ck, &e)| {
                let z = ck * Complex64::from_polar(1.0, -e * t);
                (z.re, z.im)
            })
            .unzip();
        let re = &self.vectors * DVector::from_vec(re);
        let im = &self.vectors * DVector::from_vec(im);
        re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }
}

/// Site populations of the single-excitation wavepacket over a time grid.
#[derive(Debug, Clone)]
pub struct WavepacketTrajectory {
    pub times: Vec<f64>,
    /// `populations[i][x]` = |⟨x+1|ψ(t_i)⟩|².
    pub populations: Vec<Vec<f64>>,
    pub amplitudes: Option<Vec<Vec<Complex64>>>,
    /// Largest population seen on the last site.
    pub max_edge_population: f64,
    /// Set when the front reached the end of the chain.
    pub truncation_warning: bool,
}

impl WavepacketTrajectory {
    pub fn sites(&self) -> usize {
        self.populations.first().map_or(0, Vec::len)
    }

    /// Index of the grid time nearest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&x| x < t);
        if i == 0 {
            0
        } else if i == self.times.len() {
            i - 1
        } else if (self.times[i] - t).abs() < (t - self.times[i - 1]).abs() {
            i
        } else {
            i - 1
        }
    }

    /// p_x(t) for site `x` (1-based) across the grid.
    pub fn site_series(&self, x: usize) -> Vec<f64> {
        self.populations.iter().map(|row| row[x - 1]).collect()
    }

    /// CSV with header `t,p_1,…,p_N`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.sites()).map(|x| format!("p_{x}")));
        w.write_record(&header).map_err(csv_err)?;
        for (t, row) in self.times.iter().zip(&self.populations) {
            let mut rec = vec![format_float(*t)];
            rec.extend(row.iter().map(|&p| format_float(p)));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

/// |1⟩ on a chain of `n` sites.
pub fn first_site_state(n: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[0] = Complex64::new(1.0, 0.0);
    psi
}

/// Evolves `psi0` under `h` and records populations at every grid time.
pub fn propagate(
    h: &TridiagonalHamiltonian,
    psi0: &[Complex64],
    times: &[f64],
    keep_amplitudes: bool,
) -> Result<WavepacketTrajectory> {
    if psi0.len() != h.len() {
        return Err(Error::parameter(
            "psi0",
            format!("state has {} entries for a {}-site chain", psi0.len(), h.len()),
        ));
    }
    let norm: f64 = psi0.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::parameter("psi0", format!("state is not normalized (|ψ|² = {norm})")));
    }
    let prop = h.propagator();
    let c = prop.project(psi0);
    let amps: Vec<Vec<Complex64>> = times.par_iter().map(|&t| prop.evolve_projected(&c, t)).collect();
    let populations: Vec<Vec<f64>> = amps
        .iter()
        .map(|a| a.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    let n = h.len();
    let max_edge_population = populations.iter().map(|row| row[n - 1]).fold(0.0, f64::max);
    let truncation_warning = max_edge_population > EDGE_POPULATION_LIMIT;
    if truncation_warning {
        log::warn!(
            "wavepacket reached the end of the {n}-site chain (population {max_edge_population:e}); \
             lengthen the chain"
        );
    }
    Ok(WavepacketTrajectory {
        times: times.to_vec(),
        populations,
        amplitudes: keep_amplitudes.then_some(amps),
        max_edge_population,
        truncation_warning,
    })
}

/// Survival probability |Σ_k (w_k/Σw) e^{−iω_k t}|² computed directly in
/// the star picture.
pub fn star_oracle(measure: &DiscretizedMeasure, times: &[f64]) -> Vec<f64> {
    let mass = measure.total_mass();
    times
        .par_iter()
        .map(|&t| {
            let amp: Complex64 = measure
                .nodes()
                .iter()
                .zip(measure.weights())
                .map(|(&x, &w)| Complex64::from_polar(w / mass, -x * t))
                .sum();
            amp.norm_sqr()
        })
        .collect()
}

/// Window [0, 3/(2γ)] clipped to the grid, where p_1 ≈ e^{−2γt} holds
/// before finite-chain revivals.
pub fn default_decay_window(gamma_guess: f64, times: &[f64]) -> (f64, f64) {
    let start = times.first().copied().unwrap_or(0.0);
    let end = times.last().copied().unwrap_or(0.0);
    (start, (1.5 / gamma_guess).min(end))
}

/// Rate γ such that p(t) ≈ A·e^{−2γt}: the least-squares slope of
/// −ln p / 2 over samples in `window`.
pub fn fit_decay_rate(times: &[f64], series: &[f64], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(series)
        .filter(|(&t, _)| t >= window.0 && t <= window.1)
        .map(|(&t, &p)| (t, p))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain(format!(
            "decay window [{}, {}] holds fewer than two samples",
            window.0, window.1
        )));
    }
    if let Some(&(t, p)) = pts.iter().find(|&&(_, p)| !(p > 0.0)) {
        return Err(Error::Domain(format!("population {p} at t = {t} is not positive")));
    }
    let ys: Vec<(f64, f64)> = pts.iter().map(|&(t, p)| (t, -0.5 * p.ln())).collect();
    Ok(linear_slope(&ys))
}

fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|&(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(t, _)| (t - mt) * (t - mt)).sum();
    sxy / sxx
}

/// Largest site x (1-based) with p_x(t) ≥ threshold·max_x p_x(t), for
/// every grid time.
pub fn front_position(traj: &WavepacketTrajectory, threshold: f64) -> Vec<usize> {
    traj.populations
        .iter()
        .map(|row| {
            let peak = row.iter().copied().fold(0.0, f64::max);
            row.iter().rposition(|&p| p >= threshold * peak).map_or(1, |i| i + 1)
        })
        .collect()
}

/// Front speed in sites per unit time: slope of a linear fit of the front
/// position over the last three quarters of the span before the front
/// comes within five sites of the chain end.
pub fn front_speed(traj: &WavepacketTrajectory, threshold: f64) -> Result<f64> {
    let front = front_position(traj, threshold);
    let limit = traj.sites().saturating_sub(5);
    let usable = front.iter().position(|&x| x >= limit).unwrap_or(front.len());
    if usable < 4 {
        return Err(Error::Domain("front reaches the chain end immediately".into()));
    }
    let t_end = traj.times[usable - 1];
    let t_start = traj.times[0] + 0.25 * (t_end - traj.times[0]);
    let pts: Vec<(f64, f64)> = traj.times[..usable]
        .iter()
        .zip(&front)
        .filter(|(&t, _)| t >= t_start)
        .map(|(&t, &x)| (t, x as f64))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain("too few samples to fit the front".into()));
    }
    Ok(linear_slope(&pts))
}

/// Σ_{x ≤ k} p_x at the grid time nearest to `t`.
pub fn localization_fraction(traj: &WavepacketTrajectory, k: usize, t: f64) -> f64 {
    let row = &traj.populations[traj.nearest_index(t)];
    row.iter().take(k).sum()
}

/// Angular beating frequency 2π/⟨spacing⟩ of the local maxima of a
/// population series. `None` with fewer than two maxima.
pub fn beating_frequency(times: &[f64], series: &[f64]) -> Option<f64> {
    let peaks: Vec<f64> = (1..series.len().saturating_sub(1))
        .filter(|&i| series[i] > series[i - 1] && series[i] >= series[i + 1])
        .map(|i| times[i])
        .collect();
    if peaks.len() < 2 {
        return None;
    }
    let spacing = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    Some(2.0 * std::f64::consts::PI / spacing)
}

/// Uniform time grid with `count` points on [0, t_max].
pub fn time_grid(t_max: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![0.0];
    }
    (0..count).map(|i| t_max * i as f64 / (count - 1) as f64).collect()
}
