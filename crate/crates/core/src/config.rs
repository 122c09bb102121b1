//! Strict TOML run configuration and the figure presets.
//!
//! ```toml
//! schema_version = 1
//! mode = "single"            # coeffs | single | full | thermalize-inspect
//!
//! [spectral]
//! family = "lorentzian"
//! temperature_K = 0.0
//! hard_cutoff = 1000.0       # or "auto"
//! params = { lambda = 60.0, gamma = 10.0, omega0 = 100.0 }
//!
//! [chain]
//! n = "auto"                 # light-cone length for dynamics.t_max
//! m = "auto"                 # max(400, 4n)
//!
//! [dynamics]
//! t_max = 0.2
//! n_times = 201
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json"]
//! ```
//!
//! Unknown keys anywhere are rejected. Every "auto" or omitted value is
//! resolved by [`RunConfig::resolve`] and written to the run manifest.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::chainmap::{lightcone_length, DEFAULT_NODES, NODE_HEADROOM};
use crate::error::{Error, Result};
use crate::full_dynamics::{
    default_fock_dim, EvolutionControls, DEFAULT_CHI_MAX, DEFAULT_DT, DEFAULT_STRIDE,
    DEFAULT_SVD_CUTOFF,
};
use crate::spectral::{AutoTag, Cutoff, ParamValue, SpectralBlock, SpectralDensity};

pub const SCHEMA_VERSION: u32 = 1;
/// Time samples for single-excitation runs when `dynamics.n_times` is omitted.
pub const DEFAULT_TIME_SAMPLES: usize = 201;
/// Frequency samples written by `thermalize-inspect`.
pub const DEFAULT_INSPECT_POINTS: usize = 2001;
/// Desk-scale horizon of the full-dynamics presets.
pub const FULL_PRESET_T_MAX: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Coeffs,
    Single,
    Full,
    ThermalizeInspect,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Coeffs => "coeffs",
            Mode::Single => "single",
            Mode::Full => "full",
            Mode::ThermalizeInspect => "thermalize-inspect",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coeffs" => Ok(Mode::Coeffs),
            "single" => Ok(Mode::Single),
            "full" => Ok(Mode::Full),
            "thermalize-inspect" => Ok(Mode::ThermalizeInspect),
            other => Err(Error::parameter(
                "mode",
                format!("unknown mode `{other}` (expected coeffs, single, full or thermalize-inspect)"),
            )),
        }
    }
}

/// A count that may be left to the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Count {
    Value(usize),
    Auto(AutoTag),
}

impl Default for Count {
    fn default() -> Self {
        Count::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainBlock {
    #[serde(default)]
    pub n: Count,
    #[serde(default)]
    pub m: Count,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svd_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_times: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub fock_dim: Count,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<ControlsBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub spectral: SpectralBlock,
    #[serde(default)]
    pub chain: ChainBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A configuration with every default and "auto" value filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedRun {
    pub mode: Mode,
    pub label: String,
    #[serde(skip)]
    pub spectral: SpectralDensity,
    pub spectral_block: SpectralBlock,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub t_max: Option<f64>,
    pub n_times: Option<usize>,
    pub delta: Option<f64>,
    pub fock_dim: Option<usize>,
    pub controls: Option<EvolutionControls>,
    pub inspect_points: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Checks that the blocks the mode needs are present and in range;
    /// errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::parameter(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        SpectralDensity::from_block(&self.spectral)?;
        if let Count::Value(n) = self.chain.n {
            if n == 0 {
                return Err(Error::parameter("chain.n", "must be at least 1"));
            }
        }
        if let Count::Value(m) = self.chain.m {
            if m == 0 {
                return Err(Error::parameter("chain.m", "must be at least 1"));
            }
        }
        if self.output.formats.is_empty() {
            return Err(Error::parameter("output.formats", "at least one format is required"));
        }
        let dyn_block = self.dynamics.as_ref();
        let t_max = dyn_block.and_then(|d| d.t_max);
        if let Some(t) = t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::parameter("dynamics.t_max", format!("must be positive, got {t}")));
            }
        }
        let needs_t = matches!(self.mode, Mode::Single | Mode::Full)
            || (self.mode == Mode::Coeffs && self.chain.n == Count::default());
        if needs_t && t_max.is_none() {
            let path = if dyn_block.is_none() { "dynamics" } else { "dynamics.t_max" };
            let why = if self.mode == Mode::Coeffs {
                "required to size the chain when chain.n = \"auto\""
            } else {
                "required for this mode"
            };
            return Err(Error::parameter(path, why));
        }
        if let Some(d) = dyn_block {
            if let Some(n) = d.n_times {
                if n < 2 {
                    return Err(Error::parameter("dynamics.n_times", "must be at least 2"));
                }
            }
            if let Count::Value(f) = d.fock_dim {
                if f < 2 {
                    return Err(Error::parameter("dynamics.fock_dim", "must be at least 2"));
                }
            }
        }
        if self.mode == Mode::Full {
            let d = dyn_block.expect("checked above");
            match d.delta {
                None => return Err(Error::parameter("dynamics.delta", "required in full mode")),
                Some(x) if !x.is_finite() => {
                    return Err(Error::parameter("dynamics.delta", "must be finite"))
                }
                _ => {}
            }
            self.controls(d)?.validate()?;
        }
        Ok(())
    }

    fn controls(&self, d: &DynamicsBlock) -> Result<EvolutionControls> {
        let c = d.controls.clone().unwrap_or_default();
        Ok(EvolutionControls {
            dt: c.dt.unwrap_or(DEFAULT_DT),
            t_max: d.t_max.ok_or_else(|| Error::parameter("dynamics.t_max", "missing"))?,
            chi_max: c.chi_max.unwrap_or(DEFAULT_CHI_MAX),
            svd_cutoff: c.svd_cutoff.unwrap_or(DEFAULT_SVD_CUTOFF),
            stride: c.stride.unwrap_or(DEFAULT_STRIDE),
        })
    }

    /// Validates and fills in every default.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        self.validate()?;
        let sd = SpectralDensity::from_block(&self.spectral)?;
        let dyn_block = self.dynamics.clone().unwrap_or_default();
        let t_max = dyn_block.t_max;
        let uses_chain = self.mode != Mode::ThermalizeInspect;
        let n = if uses_chain {
            Some(match self.chain.n {
                Count::Value(n) => n,
                Count::Auto(_) => lightcone_length(sd.support(), t_max.expect("validated"))?,
            })
        } else {
            None
        };
        let m = n.map(|n| match self.chain.m {
            Count::Value(m) => m,
            Count::Auto(_) => DEFAULT_NODES.max(NODE_HEADROOM * n),
        });
        let single = self.mode == Mode::Single;
        let full = self.mode == Mode::Full;
        Ok(ResolvedRun {
            mode: self.mode,
            label: self.label.clone().unwrap_or_else(|| "config".to_string()),
            spectral_block: sd.to_block(),
            spectral: sd.clone(),
            n,
            m,
            t_max: if single || full { t_max } else { None },
            n_times: single.then(|| dyn_block.n_times.unwrap_or(DEFAULT_TIME_SAMPLES)),
            delta: if full { dyn_block.delta } else { None },
            fock_dim: full.then(|| match dyn_block.fock_dim {
                Count::Value(d) => d,
                Count::Auto(_) => default_fock_dim(&sd),
            }),
            controls: if full { Some(self.controls(&dyn_block)?) } else { None },
            inspect_points: (self.mode == Mode::ThermalizeInspect).then_some(DEFAULT_INSPECT_POINTS),
        })
    }
}

/// Names accepted by [`figure_preset`].
pub const PRESETS: [&str; 6] = [
    "lorentz-T0",
    "lorentz-finiteT",
    "ohmic-T0",
    "ohmic-finiteT",
    "full-lorentz",
    "full-ohmic",
];

fn spectral(family: &str, params: &[(&str, f64)], temperature_k: f64) -> SpectralBlock {
    SpectralBlock {
        family: family.to_string(),
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), ParamValue::Scalar(*v)))
            .collect(),
        temperature_k,
        hard_cutoff: Cutoff::Value(1000.0),
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Expands a preset into its parameter variants, each labelled
/// `<name>@<variant>`. `name@variant` selects a single variant.
pub fn figure_preset(name: &str) -> Result<Vec<RunConfig>> {
    let (base, selector) = match name.split_once('@') {
        Some((b, s)) => (b, Some(s)),
        None => (name, None),
    };
    let gammas = [0.001, 1.0, 10.0];
    let exponents = [0.5, 1.0, 2.0];
    let mut variants: Vec<(String, Mode, SpectralBlock, Option<f64>)> = Vec::new();
    let lorentz = |g: f64, t: f64| {
        spectral("lorentzian", &[("lambda", 60.0), ("gamma", g), ("omega0", 100.0)], t)
    };
    let ohmic = |s: f64, t: f64| spectral("ohmic", &[("lambda", 1.0), ("s", s), ("omega_c", 100.0)], t);
    match base {
        "lorentz-T0" => {
            for g in gammas {
                variants.push((format!("gamma={}", fmt_num(g)), Mode::Single, lorentz(g, 0.0), None));
            }
        }
        "lorentz-finiteT" => {
            for g in gammas {
                for t in [77.0, 300.0] {
                    let v = format!("gamma={},T={}", fmt_num(g), fmt_num(t));
                    variants.push((v, Mode::Single, lorentz(g, t), None));
                }
            }
        }
        "ohmic-T0" => {
            for s in exponents {
                variants.push((format!("s={}", fmt_num(s)), Mode::Single, ohmic(s, 0.0), None));
            }
        }
        "ohmic-finiteT" => {
            for s in exponents {
                for t in [77.0, 300.0] {
                    let v = format!("s={},T={}", fmt_num(s), fmt_num(t));
                    variants.push((v, Mode::Single, ohmic(s, t), None));
                }
            }
        }
        "full-lorentz" => {
            for g in gammas {
                for t in [0.0, 77.0, 300.0] {
                    let v = format!("gamma={},T={}", fmt_num(g), fmt_num(t));
                    variants.push((v, Mode::Full, lorentz(g, t), Some(70.0)));
                }
            }
        }
        "full-ohmic" => {
            for s in exponents {
                for t in [0.0, 77.0, 300.0] {
                    let v = format!("s={},T={}", fmt_num(s), fmt_num(t));
                    variants.push((v, Mode::Full, ohmic(s, t), Some(70.0)));
                }
            }
        }
        other => {
            return Err(Error::parameter(
                "preset",
                format!("unknown preset `{other}` (expected one of {})", PRESETS.join(", ")),
            ))
        }
    }
    let configs: Vec<RunConfig> = variants
        .into_iter()
        .filter(|(v, ..)| selector.is_none_or(|s| s == v))
        .map(|(v, mode, spectral, delta)| {
            let full = mode == Mode::Full;
            RunConfig {
                schema_version: SCHEMA_VERSION,
                mode,
                label: Some(format!("{base}@{v}")),
                spectral,
                chain: ChainBlock::default(),
                dynamics: Some(DynamicsBlock {
                    t_max: Some(if full { FULL_PRESET_T_MAX } else { 0.2 }),
                    n_times: (!full).then_some(DEFAULT_TIME_SAMPLES),
                    delta,
                    fock_dim: Count::default(),
                    controls: full.then(|| ControlsBlock {
                        dt: Some(DEFAULT_DT),
                        chi_max: Some(DEFAULT_CHI_MAX),
                        svd_cutoff: Some(DEFAULT_SVD_CUTOFF),
                        stride: Some(DEFAULT_STRIDE),
                    }),
                }),
                output: OutputBlock::default(),
            }
        })
        .collect();
    if configs.is_empty() {
        return Err(Error::parameter(
            "preset",
            format!("preset `{base}` has no variant `{}`", selector.unwrap_or("")),
        ));
    }
    Ok(configs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"
schema_version = 1
mode = "single"

[spectral]
family = "lorentzian"
temperature_K = 0.0
hard_cutoff = 1000.0
params = { lambda = 60.0, gamma = 10.0, omega0 = 100.0 }

[dynamics]
t_max = 0.2
n_times = 201
"#;

    #[test]
    fn parses_and_resolves_defaults() {
        let cfg = RunConfig::from_toml(SINGLE).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.n, Some(125));
        assert_eq!(r.m, Some(500));
        assert_eq!(r.n_times, Some(201));
        assert_eq!(r.delta, None);
        assert_eq!(cfg.output.directory, PathBuf::from("out"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SINGLE.replace("n_times = 201", "n_times = 201\nsteps = 3");
        let e = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(e.contains("steps"), "{e}");
        let text = SINGLE.replace("gamma = 10.0", "gamma = 10.0, width = 2.0");
        let e = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(e.contains("spectral.params.width"), "{e}");
    }

    #[test]
    fn full_mode_requires_delta() {
        let text = SINGLE.replace("mode = \"single\"", "mode = \"full\"");
        let e = RunConfig::from_toml(&text).unwrap_err();
        assert!(e.to_string().contains("dynamics.delta"), "{e}");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESETS {
            let variants = figure_preset(name).unwrap();
            assert!(!variants.is_empty());
            for cfg in variants {
                cfg.validate().unwrap();
                let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
                assert_eq!(back, cfg);
            }
        }
    }

    #[test]
    fn preset_contents_and_selection() {
        let v = figure_preset("lorentz-T0").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2].label.as_deref(), Some("lorentz-T0@gamma=10"));
        let one = figure_preset("full-ohmic@s=1,T=0").unwrap();
        assert_eq!(one.len(), 1);
        let r = one[0].resolve().unwrap();
        assert_eq!(r.delta, Some(70.0));
        assert_eq!(r.fock_dim, Some(8));
        let sub = figure_preset("full-ohmic@s=0.5,T=300").unwrap()[0].resolve().unwrap();
        assert_eq!(sub.fock_dim, Some(12));
        assert!(figure_preset("full-ohmic@s=3").is_err());
        assert!(figure_preset("nope").is_err());
    }
}
