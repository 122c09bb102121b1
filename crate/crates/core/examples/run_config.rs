//! Runs a TOML configuration through the same pipeline the CLI uses and
//! lists the artifacts.
//!
//!     cargo run --release --example run_config [path.toml] [out-dir]

use std::path::PathBuf;

use chainmapper::config::RunConfig;
use chainmapper::pipeline::run;
use chainmapper::{Error, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/single-ohmic.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("chainmapper-example"));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let cfg = RunConfig::from_toml(&text)?;
    let outcome = run(&cfg, Some(&out))?;
    for line in &outcome.summary {
        println!("{line}");
    }
    Ok(())
}
