//! From a spectral density to chain coefficients.
//!
//! The measure J(ω)dω is discretized by composite Gauss–Legendre panels
//! ([`discretize`]); the three-term recurrence coefficients of the
//! discrete measure are then obtained by Lanczos tridiagonalization of
//! diag(ω_k) started from (√(w_k/Σw)), with full reorthogonalization
//! ([`recurrence_coefficients`]). The orthogonal polynomials themselves are
//! never formed.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::spectral::{ParamValue, SpectralDensity};

/// Minimum number of equal-width base panels.
pub const MIN_PANELS: usize = 8;
/// Node count used when none is requested.
pub const DEFAULT_NODES: usize = 400;
/// Required ratio of quadrature nodes to chain sites.
pub const NODE_HEADROOM: usize = 4;
/// Light-cone safety factor and extra sites, see [`lightcone_length`].
pub const LIGHTCONE_MARGIN: f64 = 1.2;
pub const LIGHTCONE_BUFFER: usize = 5;

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Quadrature approximation of J(ω)dω in the star picture.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    support: (f64, f64),
}

impl DiscretizedMeasure {
    /// Builds a measure from explicit nodes and weights. Nodes must be
    /// strictly increasing; nonpositive weights are dropped.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, support: (f64, f64)) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::parameter("weights", "length differs from nodes"));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::parameter("nodes", "must be strictly increasing"));
        }
        if !(support.0 < support.1) {
            return Err(Error::parameter("support", "lower bound must be below upper bound"));
        }
        if nodes.iter().any(|&x| x < support.0 || x > support.1) {
            return Err(Error::parameter("nodes", "must lie inside the support"));
        }
        let (nodes, weights): (Vec<f64>, Vec<f64>) = nodes
            .into_iter()
            .zip(weights)
            .filter(|&(_, w)| w > 0.0 && w.is_finite())
            .unzip();
        if nodes.is_empty() {
            return Err(Error::Domain("measure has no positive weight".into()));
        }
        Ok(DiscretizedMeasure { nodes, weights, support })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_k, the discrete counterpart of κ0².
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// First moment of the normalized measure.
    pub fn mean(&self) -> f64 {
        let m: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| x * w).sum();
        m / self.total_mass()
    }
}

#[derive(Debug, Clone, Copy)]
enum PanelMap {
    Linear,
    /// ω = anchor + (far - anchor)·v², regular at the anchor end.
    Quadratic { anchor: f64 },
    /// ω = centre + width·tan θ, flattens a Lorentzian peak.
    Tangent { centre: f64, width: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    map: PanelMap,
}

fn build_panels(sd: &SpectralDensity) -> Vec<Panel> {
    let (lo, hi) = sd.support();
    let mut edges = Vec::new();
    if lo < 0.0 && hi > 0.0 {
        let per_side = MIN_PANELS / 2;
        for k in 0..=per_side {
            edges.push(lo * (1.0 - k as f64 / per_side as f64));
        }
        for k in 1..=per_side {
            edges.push(hi * k as f64 / per_side as f64);
        }
    } else {
        for k in 0..=MIN_PANELS {
            edges.push(lo + (hi - lo) * k as f64 / MIN_PANELS as f64);
        }
    }
    let base_width = (hi - lo) / MIN_PANELS as f64;

    // Narrow peaks get a tangent-mapped core and geometric rings.
    let mut cores = Vec::new();
    for (centre, width) in sd.peaks() {
        if width * 20.0 > base_width {
            edges.push(centre);
            continue;
        }
        let core = 10.0 * width;
        cores.push((centre - core, centre + core, centre, width));
        let mut r = core;
        while r < base_width {
            edges.push(centre - r);
            edges.push(centre + r);
            r *= 4.0;
        }
    }
    edges.retain(|&x| x >= lo && x <= hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (hi - lo));

    edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let map = if let Some(&(_, _, centre, width)) = cores
                .iter()
                .find(|&&(c0, c1, _, w)| (a - c0).abs() < 1e-9 * w && (b - c1).abs() < 1e-9 * w)
            {
                PanelMap::Tangent { centre, width }
            } else if a == 0.0 {
                PanelMap::Quadratic { anchor: a }
            } else if b == 0.0 {
                PanelMap::Quadratic { anchor: b }
            } else {
                PanelMap::Linear
            };
            Panel { lo: a, hi: b, map }
        })
        .collect()
}

/// Composite Gauss–Legendre discretization of J(ω)dω with at least
/// `node_count` nodes.
///
/// The support is cut into at least [`MIN_PANELS`] equal panels (split at
/// ω = 0 for thermalized densities). Panels touching ω = 0 use a
/// quadratic map that regularizes |ω|^p behaviour there, and narrow
/// Lorentzian peaks get a tangent-mapped core panel plus geometrically
/// growing neighbours. Every panel carries ⌈M/panels⌉ points.
pub fn discretize(sd: &SpectralDensity, node_count: usize) -> Result<DiscretizedMeasure> {
    if node_count < 2 {
        return Err(Error::parameter("chain.m", format!("need at least 2 nodes, got {node_count}")));
    }
    let panels = build_panels(sd);
    let per_panel = node_count.div_ceil(panels.len()).max(2);
    let (gx, gw) = quad::gauss_legendre(per_panel);

    let mut nodes = Vec::with_capacity(per_panel * panels.len());
    let mut weights = Vec::with_capacity(per_panel * panels.len());
    for p in &panels {
        let mut local: Vec<(f64, f64)> = gx
            .iter()
            .zip(&gw)
            .map(|(&u, &w)| match p.map {
                PanelMap::Linear => {
                    let half = 0.5 * (p.hi - p.lo);
                    let x = p.lo + half * (u + 1.0);
                    (x, half * w)
                }
                PanelMap::Quadratic { anchor } => {
                    let far = if anchor == p.lo { p.hi } else { p.lo };
                    let v = 0.5 * (u + 1.0);
                    let x = anchor + (far - anchor) * v * v;
                    (x, (far - anchor).abs() * v * w)
                }
                PanelMap::Tangent { centre, width } => {
                    let t0 = ((p.lo - centre) / width).atan();
                    let t1 = ((p.hi - centre) / width).atan();
                    let half = 0.5 * (t1 - t0);
                    let theta = t0 + half * (u + 1.0);
                    let c = theta.cos();
                    (centre + width * theta.tan(), width * half * w / (c * c))
                }
            })
            .collect();
        local.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (x, dx) in local {
            nodes.push(x);
            weights.push(sd.eval(x) * dx);
        }
    }
    DiscretizedMeasure::new(nodes, weights, sd.support())
}

/// Chain Hamiltonian data: κ0 couples the system to site 1, ω_n are the
/// site energies and κ_n the hoppings between sites n and n+1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCoefficients {
    pub kappa0: f64,
    pub omegas: Vec<f64>,
    pub kappas: Vec<f64>,
    pub support: (f64, f64),
    pub temperature_k: f64,
    pub metadata: ChainMetadata,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMetadata {
    pub hard_cutoff: Option<f64>,
    pub node_count: usize,
    pub family: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

/// Current version of the coefficient document.
pub const COEFFICIENTS_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsDocument {
    version: u32,
    support: [f64; 2],
    #[serde(rename = "temperature_K")]
    temperature_k: f64,
    kappa0: f64,
    omegas: Vec<f64>,
    kappas: Vec<f64>,
    metadata: ChainMetadata,
}

impl ChainCoefficients {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// First `n` sites of the chain.
    pub fn truncated(&self, n: usize) -> Result<ChainCoefficients> {
        if n == 0 || n > self.len() {
            return Err(Error::parameter(
                "chain.n",
                format!("cannot truncate a {}-site chain to {n} sites", self.len()),
            ));
        }
        Ok(ChainCoefficients {
            omegas: self.omegas[..n].to_vec(),
            kappas: self.kappas[..n - 1].to_vec(),
            ..self.clone()
        })
    }

    /// Versioned JSON document. Floats are written in shortest
    /// round-trip form and parse back bit-exactly.
    pub fn to_json(&self) -> Result<String> {
        let doc = CoefficientsDocument {
            version: COEFFICIENTS_VERSION,
            support: [self.support.0, self.support.1],
            temperature_k: self.temperature_k,
            kappa0: self.kappa0,
            omegas: self.omegas.clone(),
            kappas: self.kappas.clone(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CoefficientsDocument =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if doc.version != COEFFICIENTS_VERSION {
            return Err(Error::parameter(
                "version",
                format!("unsupported coefficient document version {}", doc.version),
            ));
        }
        if doc.omegas.is_empty() || doc.kappas.len() + 1 != doc.omegas.len() {
            return Err(Error::parameter(
                "kappas",
                format!("expected {} couplings for {} sites", doc.omegas.len().saturating_sub(1), doc.omegas.len()),
            ));
        }
        Ok(ChainCoefficients {
            kappa0: doc.kappa0,
            omegas: doc.omegas,
            kappas: doc.kappas,
            support: (doc.support[0], doc.support[1]),
            temperature_k: doc.temperature_k,
            metadata: doc.metadata,
        })
    }
}

/// Recurrence coefficients for a chain of `n` sites. Requires
/// `n ≤ nodes / NODE_HEADROOM` so the discrete measure represents the
/// continuum.
pub fn recurrence_coefficients(measure: &DiscretizedMeasure, n: usize) -> Result<ChainCoefficients> {
    if n * NODE_HEADROOM > measure.len() {
        return Err(Error::parameter(
            "chain.m",
            format!(
                "{} quadrature nodes cannot resolve {n} chain sites; need at least {}",
                measure.len(),
                n * NODE_HEADROOM
            ),
        ));
    }
    lanczos(measure, n)
}

/// Lanczos tridiagonalization of the discrete measure to `n` sites,
/// bounded only by the number of nodes. The first-site dynamics of the
/// resulting chain equals the star dynamics of this exact measure.
pub fn lanczos(measure: &DiscretizedMeasure, n: usize) -> Result<ChainCoefficients> {
    let m = measure.len();
    if n == 0 {
        return Err(Error::parameter("chain.n", "chain needs at least one site"));
    }
    if n > m {
        return Err(Error::parameter(
            "chain.n",
            format!("a measure with {m} nodes supports at most {m} sites, asked for {n}"),
        ));
    }
    let x = DVector::from_column_slice(measure.nodes());
    let mass = measure.total_mass();
    let scale = x.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(f64::MIN_POSITIVE);

    // Columns of `basis` are the Lanczos vectors q_k = p_k(ω)·√(w/Σw).
    let mut basis = DMatrix::<f64>::zeros(m, n);
    basis.set_column(0, &DVector::from_iterator(m, measure.weights().iter().map(|w| (w / mass).sqrt())));
    let mut omegas = Vec::with_capacity(n);
    let mut kappas = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n {
        let mut v = basis.column(k).component_mul(&x);
        let alpha = basis.column(k).dot(&v);
        omegas.push(alpha);
        if k + 1 == n {
            break;
        }
        // Classical Gram–Schmidt against the whole basis, repeated while a
        // pass removes more than ~30% of the norm (Kahan–Parlett).
        let q = basis.columns(0, k + 1);
        let mut norm = v.norm();
        for _ in 0..3 {
            let c = q.tr_mul(&v);
            v.gemv(-1.0, &q, &c, 1.0);
            let after = v.norm();
            let done = after > 0.7 * norm;
            norm = after;
            if done {
                break;
            }
        }
        let beta = norm;
        if beta <= 1e-13 * scale {
            return Err(Error::Numerical(format!(
                "Lanczos breakdown after {} sites: the measure has too few distinct nodes \
                 for a {n}-site chain; increase the node count",
                k + 1
            )));
        }
        kappas.push(beta);
        basis.set_column(k + 1, &(v / beta));
    }

    let gram = basis.tr_mul(&basis);
    let loss = (gram - DMatrix::<f64>::identity(n, n)).amax();
    if loss > ORTHOGONALITY_TOL {
        return Err(Error::Numerical(format!(
            "Lanczos basis lost orthogonality ({loss:e} > {ORTHOGONALITY_TOL:e}); \
             increase the node count"
        )));
    }

    Ok(ChainCoefficients {
        kappa0: mass.sqrt(),
        omegas,
        kappas,
        support: measure.support(),
        temperature_k: 0.0,
        metadata: ChainMetadata {
            node_count: m,
            ..ChainMetadata::default()
        },
    })
}

/// Discretizes `sd` with `node_count` nodes (or the default, raised to
/// satisfy the headroom rule) and maps it onto an `n`-site chain.
pub fn chain_for(sd: &SpectralDensity, n: usize, node_count: Option<usize>) -> Result<ChainCoefficients> {
    let m = node_count.unwrap_or_else(|| DEFAULT_NODES.max(NODE_HEADROOM * n));
    let measure = discretize(sd, m)?;
    let mut chain = recurrence_coefficients(&measure, n)?;
    chain.temperature_k = sd.temperature_k();
    chain.metadata.hard_cutoff = Some(sd.hard_cutoff());
    chain.metadata.family = Some(sd.family().name().to_string());
    chain.metadata.params = sd.family().params();
    Ok(chain)
}

/// Limits (ω_∞, κ_∞) = ((ω_max + ω_min)/2, (ω_max − ω_min)/4) of the
/// recurrence coefficients for Szegő-class measures on `[ω_min, ω_max]`.
pub fn asymptotic_limits(support: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = support;
    if !(lo < hi) {
        return Err(Error::parameter("support", format!("degenerate interval [{lo}, {hi}]")));
    }
    Ok((0.5 * (hi + lo), 0.25 * (hi - lo)))
}

/// Sites reached by an excitation starting at site 1 within `t_max`:
/// ⌈2κ_∞·t_max·margin⌉ + buffer.
pub fn lightcone_length(support: (f64, f64), t_max: f64) -> Result<usize> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::parameter("dynamics.t_max", format!("must be nonnegative, got {t_max}")));
    }
    let (_, kappa_inf) = asymptotic_limits(support)?;
    // Rounding guard so that e.g. 120.00000000000001 counts as 120.
    let base = 2.0 * kappa_inf * t_max * LIGHTCONE_MARGIN;
    let sites = (base * (1.0 - 1e-12)).ceil() as usize;
    Ok(sites + LIGHTCONE_BUFFER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Family;

    fn flat_measure(nodes_per_panel: usize, panels: usize) -> DiscretizedMeasure {
        let (gx, gw) = quad::gauss_legendre(nodes_per_panel);
        let mut x = Vec::new();
        let mut w = Vec::new();
        for p in 0..panels {
            let a = p as f64 / panels as f64;
            let h = 0.5 / panels as f64;
            for (u, wu) in gx.iter().zip(&gw) {
                x.push(a + h * (u + 1.0));
                w.push(h * wu);
            }
        }
        DiscretizedMeasure::new(x, w, (0.0, 1.0)).unwrap()
    }

    #[test]
    fn single_node_measure() {
        let m = DiscretizedMeasure::new(vec![3.0], vec![4.0], (0.0, 10.0)).unwrap();
        let c = lanczos(&m, 1).unwrap();
        assert!((c.kappa0 - 2.0).abs() < 1e-15);
        assert!((c.omegas[0] - 3.0).abs() < 1e-15);
        assert!(c.kappas.is_empty());
    }

    #[test]
    fn headroom_rule_enforced() {
        let m = flat_measure(5, 4);
        assert!(recurrence_coefficients(&m, 5).is_ok());
        let err = recurrence_coefficients(&m, 6).unwrap_err();
        assert!(matches!(err, Error::Parameter { .. }));
    }

    #[test]
    fn breakdown_reported() {
        let m = DiscretizedMeasure::new(vec![1.0, 2.0], vec![1.0, 1.0], (0.0, 3.0)).unwrap();
        assert!(lanczos(&m, 2).is_ok());
        let three = DiscretizedMeasure::new(vec![1.0, 2.0, 2.0 + 1e-15], vec![1.0, 1.0, 1.0], (0.0, 3.0));
        if let Ok(m) = three {
            assert!(lanczos(&m, 3).is_err());
        }
    }

    #[test]
    fn asymptotics() {
        assert_eq!(asymptotic_limits((0.0, 1000.0)).unwrap(), (500.0, 250.0));
        assert_eq!(asymptotic_limits((-1000.0, 1000.0)).unwrap(), (0.0, 500.0));
        assert_eq!(asymptotic_limits((0.0, 1.0)).unwrap(), (0.5, 0.25));
        assert!(asymptotic_limits((1.0, 1.0)).is_err());
    }

    #[test]
    fn lightcone_examples() {
        assert_eq!(lightcone_length((0.0, 1000.0), 0.2).unwrap(), 125);
        assert_eq!(lightcone_length((-1000.0, 1000.0), 0.1).unwrap(), 125);
        assert_eq!(lightcone_length((0.0, 1000.0), 0.0).unwrap(), 5);
    }

    #[test]
    fn nodes_avoid_origin_and_stay_inside() {
        for t in [0.0, 300.0] {
            let sd = SpectralDensity::new(Family::ohmic(1.0, 0.5, 100.0).unwrap(), 1000.0)
                .unwrap()
                .at_temperature(t)
                .unwrap();
            let m = discretize(&sd, 400).unwrap();
            let (lo, hi) = sd.support();
            assert!(m.len() >= 400);
            assert!(m.nodes().iter().all(|&x| x != 0.0 && x > lo && x < hi));
            assert!(m.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn narrow_lorentzian_mass_is_resolved() {
        // Partial-fraction form of the Lorentzian integrates in closed form.
        let (lambda, gamma, omega0, hc) = (60.0f64, 1e-3f64, 100.0f64, 1000.0f64);
        let sd = SpectralDensity::new(Family::lorentzian(lambda, gamma, omega0).unwrap(), hc).unwrap();
        let m = discretize(&sd, 400).unwrap();
        let prim = |w: f64| {
            lambda * lambda / std::f64::consts::PI
                * (((w - omega0) / gamma).atan() - ((w + omega0) / gamma).atan())
        };
        let exact = prim(hc) - prim(0.0);
        assert!((m.total_mass() - exact).abs() < 1e-10 * exact, "{} vs {exact}", m.total_mass());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let sd = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0).unwrap(), 1000.0).unwrap();
        let c = chain_for(&sd, 20, None).unwrap();
        let back = ChainCoefficients::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        for (a, b) in back.omegas.iter().zip(&c.omegas) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let sd = SpectralDensity::new(Family::ohmic(1.0, 1.0, 100.0).unwrap(), 1000.0).unwrap();
        let text = chain_for(&sd, 4, None).unwrap().to_json().unwrap();
        let text = text.replacen("\"version\": 1", "\"version\": 7", 1);
        assert!(ChainCoefficients::from_json(&text).is_err());
    }
}
