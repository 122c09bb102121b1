//! Spectral densities J(ω), the thermal (T-TEDOPA) transformation and
//! hard-cutoff selection.
//!
//! A [`SpectralDensity`] always stores the zero-temperature density of
//! the physical bath together with a temperature tag. At T = 0 it is
//! evaluated on `[0, ω_hc]`; at T > 0 it is the thermalized density
//!
//! ```text
//! J_β(ω) = J'(ω) / (1 - e^{-βω}),   J'(ω) = sign(ω) J(|ω|)
//! ```
//!
//! on `[-ω_hc, ω_hc]`, which is the same as `(J'/2)(1 + coth(βω/2))`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::units;

/// Closed-form (or tabulated) zero-temperature spectral density families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Asymmetric Lorentzian centred at `omega0` with width `gamma`.
    Lorentzian { lambda: f64, gamma: f64, omega0: f64 },
    /// Ohmic family ω^s e^{-ω/ω_c}; `s < 1` sub-Ohmic, `s > 1` super-Ohmic.
    Ohmic { lambda: f64, s: f64, omega_c: f64 },
    /// Piecewise-linear interpolation of `(omega, j)` samples, `omega ≥ 0`
    /// strictly increasing.
    Tabulated { omega: Vec<f64>, j: Vec<f64> },
}

impl Family {
    pub fn lorentzian(lambda: f64, gamma: f64, omega0: f64) -> Result<Self> {
        check_nonnegative("lambda", lambda)?;
        check_positive("gamma", gamma)?;
        check_positive("omega0", omega0)?;
        Ok(Family::Lorentzian { lambda, gamma, omega0 })
    }

    pub fn ohmic(lambda: f64, s: f64, omega_c: f64) -> Result<Self> {
        check_nonnegative("lambda", lambda)?;
        check_positive("s", s)?;
        check_positive("omega_c", omega_c)?;
        Ok(Family::Ohmic { lambda, s, omega_c })
    }

    pub fn tabulated(omega: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        if omega.len() != j.len() {
            return Err(Error::parameter(
                "j",
                format!("length {} does not match omega length {}", j.len(), omega.len()),
            ));
        }
        if omega.len() < 2 {
            return Err(Error::parameter("omega", "need at least two samples"));
        }
        if omega[0] < 0.0 {
            return Err(Error::parameter("omega", "samples must be nonnegative"));
        }
        if !omega.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::parameter("omega", "samples must be strictly increasing"));
        }
        if let Some(bad) = j.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter("j", format!("non-finite sample {bad}")));
        }
        let j = j.into_iter().map(|v| v.max(0.0)).collect();
        Ok(Family::Tabulated { omega, j })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Lorentzian { .. } => "lorentzian",
            Family::Ohmic { .. } => "ohmic",
            Family::Tabulated { .. } => "tabulated",
        }
    }

    /// Characteristic frequency used for grids and tolerances.
    pub fn scale(&self) -> f64 {
        match *self {
            Family::Lorentzian { omega0, .. } => omega0,
            Family::Ohmic { omega_c, .. } => omega_c,
            Family::Tabulated { ref omega, .. } => omega[omega.len() - 1] / 16.0,
        }
    }

    /// J(ω) for ω ≥ 0, without any cutoff.
    pub fn eval(&self, omega: f64) -> f64 {
        if omega < 0.0 {
            return 0.0;
        }
        match *self {
            Family::Lorentzian { lambda, gamma, omega0 } => {
                omega * self.over_omega_lorentzian(lambda, gamma, omega0, omega)
            }
            Family::Ohmic { lambda, s, omega_c } => {
                let norm = lambda * lambda / (PI * gamma_fn(s + 1.0));
                norm * omega_c * (omega / omega_c).powf(s) * (-omega / omega_c).exp()
            }
            Family::Tabulated { omega: ref grid, ref j } => interpolate(grid, j, omega),
        }
        .max(0.0)
    }

    /// J(ω)/ω for ω ≥ 0, finite wherever the analytic limit is.
    pub fn over_omega(&self, omega: f64) -> f64 {
        match *self {
            Family::Lorentzian { lambda, gamma, omega0 } => {
                self.over_omega_lorentzian(lambda, gamma, omega0, omega)
            }
            Family::Ohmic { lambda, s, omega_c } => {
                let norm = lambda * lambda / (PI * gamma_fn(s + 1.0));
                if omega == 0.0 {
                    return if s > 1.0 {
                        0.0
                    } else if s == 1.0 {
                        norm
                    } else {
                        f64::INFINITY
                    };
                }
                norm * (omega / omega_c).powf(s - 1.0) * (-omega / omega_c).exp()
            }
            Family::Tabulated { omega: ref grid, ref j } => {
                if omega > 0.0 {
                    interpolate(grid, j, omega) / omega
                } else {
                    // Slope of the first interpolation segment.
                    let k = grid.iter().position(|&w| w > 0.0).unwrap_or(grid.len() - 1);
                    interpolate(grid, j, grid[k]) / grid[k]
                }
            }
        }
        .max(0.0)
    }

    fn over_omega_lorentzian(&self, lambda: f64, gamma: f64, omega0: f64, omega: f64) -> f64 {
        let g2 = gamma * gamma;
        lambda * lambda / PI * 4.0 * gamma * omega0
            / ((g2 + (omega + omega0).powi(2)) * (g2 + (omega - omega0).powi(2)))
    }

    /// Scales the overall coupling so that J → factor²·J.
    pub fn with_lambda_scaled(&self, factor: f64) -> Family {
        match self.clone() {
            Family::Lorentzian { lambda, gamma, omega0 } => Family::Lorentzian {
                lambda: lambda * factor,
                gamma,
                omega0,
            },
            Family::Ohmic { lambda, s, omega_c } => Family::Ohmic {
                lambda: lambda * factor,
                s,
                omega_c,
            },
            Family::Tabulated { omega, j } => Family::Tabulated {
                omega,
                j: j.into_iter().map(|v| v * factor * factor).collect(),
            },
        }
    }

    /// Parameter map used for serialization and run manifests.
    pub fn params(&self) -> BTreeMap<String, ParamValue> {
        let mut m = BTreeMap::new();
        match self {
            Family::Lorentzian { lambda, gamma, omega0 } => {
                m.insert("lambda".into(), ParamValue::Scalar(*lambda));
                m.insert("gamma".into(), ParamValue::Scalar(*gamma));
                m.insert("omega0".into(), ParamValue::Scalar(*omega0));
            }
            Family::Ohmic { lambda, s, omega_c } => {
                m.insert("lambda".into(), ParamValue::Scalar(*lambda));
                m.insert("s".into(), ParamValue::Scalar(*s));
                m.insert("omega_c".into(), ParamValue::Scalar(*omega_c));
            }
            Family::Tabulated { omega, j } => {
                m.insert("omega".into(), ParamValue::List(omega.clone()));
                m.insert("j".into(), ParamValue::List(j.clone()));
            }
        }
        m
    }

    /// Inverse of [`Family::params`]; unknown or missing keys are errors
    /// naming `<prefix>.<key>`.
    pub fn from_params(
        name: &str,
        params: &BTreeMap<String, ParamValue>,
        prefix: &str,
    ) -> Result<Family> {
        let allowed: &[&str] = match name {
            "lorentzian" => &["lambda", "gamma", "omega0"],
            "ohmic" => &["lambda", "s", "omega_c"],
            "tabulated" => &["omega", "j"],
            other => {
                return Err(Error::parameter(
                    "spectral.family",
                    format!("unknown family `{other}` (expected lorentzian, ohmic or tabulated)"),
                ))
            }
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::parameter(
                format!("{prefix}.{k}"),
                format!("unknown parameter for family `{name}`"),
            ));
        }
        let scalar = |k: &str| -> Result<f64> {
            match params.get(k) {
                Some(ParamValue::Scalar(v)) => Ok(*v),
                Some(ParamValue::List(_)) => {
                    Err(Error::parameter(format!("{prefix}.{k}"), "expected a number"))
                }
                None => Err(Error::parameter(format!("{prefix}.{k}"), "missing")),
            }
        };
        let list = |k: &str| -> Result<Vec<f64>> {
            match params.get(k) {
                Some(ParamValue::List(v)) => Ok(v.clone()),
                Some(ParamValue::Scalar(_)) => {
                    Err(Error::parameter(format!("{prefix}.{k}"), "expected a list"))
                }
                None => Err(Error::parameter(format!("{prefix}.{k}"), "missing")),
            }
        };
        let prefixed = |e: Error| match e {
            Error::Parameter { path, message } => Error::Parameter {
                path: format!("{prefix}.{path}"),
                message,
            },
            other => other,
        };
        match name {
            "lorentzian" => {
                Family::lorentzian(scalar("lambda")?, scalar("gamma")?, scalar("omega0")?)
                    .map_err(prefixed)
            }
            "ohmic" => {
                Family::ohmic(scalar("lambda")?, scalar("s")?, scalar("omega_c")?).map_err(prefixed)
            }
            _ => Family::tabulated(list("omega")?, list("j")?).map_err(prefixed),
        }
    }
}

/// A parameter value in a spectral-density parameter map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

/// Spectral density with hard cutoff and temperature tag.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    family: Family,
    hard_cutoff: f64,
    temperature_k: f64,
}

impl SpectralDensity {
    /// Zero-temperature density on `[0, hard_cutoff]`.
    pub fn new(family: Family, hard_cutoff: f64) -> Result<Self> {
        check_positive("hard_cutoff", hard_cutoff)?;
        Ok(SpectralDensity {
            family,
            hard_cutoff,
            temperature_k: 0.0,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn hard_cutoff(&self) -> f64 {
        self.hard_cutoff
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    pub fn beta(&self) -> Option<f64> {
        units::beta(self.temperature_k)
    }

    pub fn is_thermal(&self) -> bool {
        self.temperature_k > 0.0
    }

    /// `[0, ω_hc]` at T = 0, `[-ω_hc, ω_hc]` at T > 0.
    pub fn support(&self) -> (f64, f64) {
        if self.is_thermal() {
            (-self.hard_cutoff, self.hard_cutoff)
        } else {
            (0.0, self.hard_cutoff)
        }
    }

    pub fn scale(&self) -> f64 {
        self.family.scale()
    }

    /// J(ω), or J_β(ω) when the temperature tag is positive. Zero outside
    /// the support.
    pub fn eval(&self, omega: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(omega >= lo && omega <= hi) {
            return 0.0;
        }
        let Some(beta) = self.beta() else {
            return self.family.eval(omega);
        };
        let abs = omega.abs();
        let x = beta * omega;
        let value = if abs < 1e-6 * self.scale() {
            // J'(ω)/(1 - e^{-x}) = (J(|ω|)/(β|ω|)) (1 + x/2 + x²/12 - x⁴/720 + …)
            let lead = self.family.over_omega(abs) / beta;
            let x2 = x * x;
            lead * (1.0 + 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0)
        } else {
            let signed = omega.signum() * self.family.eval(abs);
            signed / -(-x).exp_m1()
        };
        value.max(0.0)
    }

    /// Frequencies where J has narrow features, as `(centre, width)`.
    pub fn peaks(&self) -> Vec<(f64, f64)> {
        match self.family {
            Family::Lorentzian { gamma, omega0, .. } => {
                let mut v = vec![(omega0, gamma)];
                if self.is_thermal() {
                    v.insert(0, (-omega0, gamma));
                }
                v.retain(|(c, _)| c.abs() < self.hard_cutoff);
                v
            }
            _ => Vec::new(),
        }
    }

    /// Same bath at a different temperature; see [`thermalize`].
    pub fn at_temperature(&self, temperature_k: f64) -> Result<Self> {
        if !(temperature_k >= 0.0) || !temperature_k.is_finite() {
            return Err(Error::parameter(
                "temperature_K",
                format!("must be finite and nonnegative, got {temperature_k}"),
            ));
        }
        Ok(SpectralDensity {
            temperature_k,
            ..self.clone()
        })
    }

    pub fn with_hard_cutoff(&self, hard_cutoff: f64) -> Result<Self> {
        check_positive("hard_cutoff", hard_cutoff)?;
        Ok(SpectralDensity {
            hard_cutoff,
            ..self.clone()
        })
    }

    pub fn with_lambda_scaled(&self, factor: f64) -> Self {
        SpectralDensity {
            family: self.family.with_lambda_scaled(factor),
            ..self.clone()
        }
    }

    /// Structured-text block used by run configurations.
    pub fn to_block(&self) -> SpectralBlock {
        SpectralBlock {
            family: self.family.name().to_string(),
            params: self.family.params(),
            temperature_k: self.temperature_k,
            hard_cutoff: Cutoff::Value(self.hard_cutoff),
        }
    }

    pub fn from_block(block: &SpectralBlock) -> Result<Self> {
        let family = Family::from_params(&block.family, &block.params, "spectral.params")?;
        let hard_cutoff = match block.hard_cutoff {
            Cutoff::Value(v) => v,
            Cutoff::Auto(_) => {
                let probe = SpectralDensity::new(family.clone(), 1.0)?;
                choose_hard_cutoff(&probe, DEFAULT_CUTOFF_TOLERANCE)?
            }
        };
        let sd = SpectralDensity::new(family, hard_cutoff).map_err(|e| match e {
            Error::Parameter { message, .. } => Error::parameter("spectral.hard_cutoff", message),
            other => other,
        })?;
        sd.at_temperature(block.temperature_k).map_err(|e| match e {
            Error::Parameter { message, .. } => Error::parameter("spectral.temperature_K", message),
            other => other,
        })
    }
}

/// Target for the neglected relative reorganization energy.
pub const DEFAULT_CUTOFF_TOLERANCE: f64 = 1e-4;

/// Hard cutoff: a frequency, or `"auto"` for [`choose_hard_cutoff`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Value(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// Serialized form of a [`SpectralDensity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralBlock {
    pub family: String,
    pub params: BTreeMap<String, ParamValue>,
    #[serde(rename = "temperature_K", default)]
    pub temperature_k: f64,
    pub hard_cutoff: Cutoff,
}

/// Thermalized density J_β at temperature `temperature_k`. T = 0 returns
/// the input unchanged.
pub fn thermalize(sd: &SpectralDensity, temperature_k: f64) -> Result<SpectralDensity> {
    if temperature_k == 0.0 {
        return Ok(sd.clone());
    }
    sd.at_temperature(temperature_k)
}

/// Neglected relative reorganization energy
/// ∫_{ω_hc}^∞ J/ω dω ÷ ∫_0^∞ J/ω dω of the zero-temperature family,
/// ignoring the density's own cutoff.
pub fn reorganization_tail_ratio(sd: &SpectralDensity, hard_cutoff: f64) -> Result<f64> {
    check_positive("hard_cutoff", hard_cutoff)?;
    let family = sd.family();
    let f = |w: f64| family.over_omega(w);
    let tol = Tolerance {
        relative: 1e-12,
        absolute: 0.0,
        max_segments: 50_000,
    };
    let breaks: Vec<f64> = match family {
        Family::Lorentzian { omega0, gamma, .. } => vec![omega0 - 10.0 * gamma, *omega0, omega0 + 10.0 * gamma],
        Family::Tabulated { omega, .. } => omega.clone(),
        Family::Ohmic { omega_c, .. } => vec![*omega_c],
    };
    let nominal_end = match family {
        Family::Tabulated { omega, .. } => Some(omega[omega.len() - 1]),
        _ => None,
    };
    let integral_between = |a: f64, b: f64| -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        if a == 0.0 {
            Ok(quad::integrate_from_origin(f, b, &breaks, tol)?.value)
        } else {
            Ok(quad::integrate(f, a, b, &breaks, tol)?.value)
        }
    };
    let integral_from = |a: f64| -> Result<f64> {
        match nominal_end {
            Some(end) => integral_between(a, end),
            None => {
                // Finite part up to the last feature, then the mapped tail.
                let pivot = breaks.iter().copied().fold(a, f64::max).max(a);
                let head = integral_between(a, pivot)?;
                let tail = quad::integrate_to_infinity(f, pivot, tol)?.value;
                Ok(head + tail)
            }
        }
    };
    let total = integral_from(0.0)?;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Domain(format!(
            "reorganization energy integral is not finite and positive ({total})"
        )));
    }
    let tail = integral_from(hard_cutoff)?;
    Ok((tail / total).clamp(0.0, 1.0))
}

/// Smallest cutoff on the quarter-octave grid ω_scale·2^{k/4}, k ≥ 0,
/// whose neglected relative reorganization energy is at most `tol`.
pub fn choose_hard_cutoff(sd: &SpectralDensity, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1.0) {
        return Err(Error::parameter("tol", format!("must lie in (0, 1], got {tol}")));
    }
    let scale = sd.scale();
    for k in 0..=160 {
        let candidate = scale * 2f64.powf(k as f64 / 4.0);
        if reorganization_tail_ratio(sd, candidate)? <= tol {
            return Ok(candidate);
        }
    }
    Err(Error::Domain(format!(
        "no cutoff below {:e} reaches relative tail {tol:e}",
        scale * 2f64.powi(40)
    )))
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x < grid[0] || x > grid[n - 1] {
        return 0.0;
    }
    let i = grid.partition_point(|&g| g <= x).clamp(1, n - 1);
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::parameter(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::parameter(name, format!("must be nonnegative and finite, got {v}")))
    }
}

/// Γ(x) for x > 0 (Lanczos approximation, g = 7).
pub(crate) fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ohmic(s: f64) -> SpectralDensity {
        SpectralDensity::new(Family::ohmic(1.0, s, 100.0).unwrap(), 1000.0).unwrap()
    }

    fn lorentz(gamma: f64) -> SpectralDensity {
        SpectralDensity::new(Family::lorentzian(60.0, gamma, 100.0).unwrap(), 1000.0).unwrap()
    }

    #[test]
    fn gamma_function_values() {
        assert!((gamma_fn(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma_fn(3.0) - 2.0).abs() < 1e-13);
        assert!((gamma_fn(1.5) - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(ohmic(1.0).eval(0.0), 0.0);
        assert_eq!(lorentz(10.0).eval(0.0), 0.0);
        let expected = 3600.0 / PI * 400_000.0 / 4_010_000.0;
        assert!((lorentz(10.0).eval(100.0) - expected).abs() < 1e-12 * expected);
        let expected = 100.0 / PI * (-1.0f64).exp();
        assert!((ohmic(1.0).eval(100.0) - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn outside_support_is_zero() {
        let sd = ohmic(1.0);
        assert_eq!(sd.eval(-1.0), 0.0);
        assert_eq!(sd.eval(1000.5), 0.0);
        let hot = sd.at_temperature(300.0).unwrap();
        assert!(hot.eval(-1.0) > 0.0);
        assert_eq!(hot.eval(-1000.5), 0.0);
    }

    #[test]
    fn invalid_parameters_rejected_at_construction() {
        assert!(Family::lorentzian(1.0, 0.0, 100.0).is_err());
        assert!(Family::ohmic(1.0, 1.0, -1.0).is_err());
        assert!(Family::ohmic(1.0, 0.0, 100.0).is_err());
        assert!(Family::ohmic(-1.0, 1.0, 100.0).is_err());
        assert!(Family::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(thermalize(&ohmic(1.0), -1.0).is_err());
    }

    #[test]
    fn zero_temperature_thermalize_is_identity() {
        let sd = lorentz(10.0);
        assert_eq!(thermalize(&sd, 0.0).unwrap(), sd);
    }

    #[test]
    fn thermal_limit_at_origin_is_continuous() {
        let hot = ohmic(1.0).at_temperature(300.0).unwrap();
        let beta = hot.beta().unwrap();
        let limit = 1.0 / (PI * beta);
        assert!((hot.eval(0.0) - limit).abs() < 1e-14 * limit);
        // Just either side of the series threshold.
        for w in [0.99e-4, 1.01e-4, -0.99e-4, -1.01e-4] {
            let direct = w / PI * (-w / 100.0f64).exp() / -(-beta * w).exp_m1();
            let direct = if w < 0.0 {
                w.abs() / PI * (-w.abs() / 100.0f64).exp() / (beta * w.abs()).exp_m1()
            } else {
                direct
            };
            assert!((hot.eval(w) - direct).abs() < 1e-12 * direct, "w={w}");
        }
    }

    #[test]
    fn thermal_lorentzian_has_two_peaks() {
        let hot = lorentz(10.0).at_temperature(300.0).unwrap();
        let grid: Vec<f64> = (-1000..=1000).map(|k| k as f64 * 0.5).collect();
        let vals: Vec<f64> = grid.iter().map(|&w| hot.eval(w)).collect();
        let maxima: Vec<f64> = (1..vals.len() - 1)
            .filter(|&i| vals[i] > vals[i - 1] && vals[i] > vals[i + 1])
            .map(|i| grid[i])
            .collect();
        assert_eq!(maxima.len(), 2, "{maxima:?}");
        assert!((maxima[0] + 100.0).abs() < 5.0);
        assert!((maxima[1] - 100.0).abs() < 5.0);
    }

    #[test]
    fn auto_cutoff_block_resolves() {
        let block = SpectralBlock {
            family: "ohmic".into(),
            params: Family::ohmic(1.0, 1.0, 100.0).unwrap().params(),
            temperature_k: 0.0,
            hard_cutoff: Cutoff::Auto(AutoTag::Auto),
        };
        let sd = SpectralDensity::from_block(&block).unwrap();
        assert!(sd.hard_cutoff() <= 1000.0);
        assert!(reorganization_tail_ratio(&sd, sd.hard_cutoff()).unwrap() <= 1e-4);
    }

    #[test]
    fn unknown_parameter_is_named() {
        let mut params = Family::ohmic(1.0, 1.0, 100.0).unwrap().params();
        params.insert("gamma".into(), ParamValue::Scalar(1.0));
        let err = Family::from_params("ohmic", &params, "spectral.params").unwrap_err();
        assert!(err.to_string().contains("spectral.params.gamma"), "{err}");
    }

    #[test]
    fn tabulated_interpolates() {
        let f = Family::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert!((f.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((f.eval(1.5) - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(2.5), 0.0);
    }
}
