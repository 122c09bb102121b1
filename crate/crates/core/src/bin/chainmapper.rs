//! chainmapper <mode> (--config <path> | --preset <name>) [--out <dir>] [--jobs <n>]
//!
//! Exit status: 0 success, 1 configuration, 2 numerical, 3 I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use chainmapper::config::{figure_preset, Mode, RunConfig};
use chainmapper::pipeline::run_all;
use chainmapper::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Coeffs,
    Single,
    Full,
    ThermalizeInspect,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Coeffs => Mode::Coeffs,
            ModeArg::Single => Mode::Single,
            ModeArg::Full => Mode::Full,
            ModeArg::ThermalizeInspect => Mode::ThermalizeInspect,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chainmapper", version, about = "Chain mapping and dynamics of bosonic environments")]
#[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
struct Cli {
    /// Pipeline to run; overrides the mode stored in the config.
    #[arg(value_enum)]
    mode: ModeArg,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure preset, optionally `name@variant` for one variant.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: the config's output.directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Independent runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load(cli: &Cli) -> Result<Vec<RunConfig>, Error> {
    let mut configs = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            // Validated below, after the mode override.
            let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            vec![cfg]
        }
        (None, Some(name)) => figure_preset(name)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    for c in &mut configs {
        c.mode = cli.mode.into();
        c.validate()?;
    }
    Ok(configs)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let configs = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let results = match run_all(&configs, cli.out.as_deref(), cli.jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut status = 0u8;
    for (cfg, res) in configs.iter().zip(results) {
        let label = cfg.label.as_deref().unwrap_or("config");
        match res {
            Ok(out) => {
                for line in &out.summary {
                    println!("[{label}] {line}");
                }
            }
            Err(e) => {
                eprintln!("[{label}] error: {e}");
                if status == 0 {
                    status = e.exit_code() as u8;
                }
            }
        }
    }
    ExitCode::from(status)
}
