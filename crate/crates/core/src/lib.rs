//! Chain mapping of bosonic environments and excitation dynamics on the
//! resulting oscillator chains.
//!
//! The pipeline runs from a [`spectral::SpectralDensity`] (optionally
//! thermalized) through a quadrature discretization and a Lanczos
//! recurrence to [`chainmap::ChainCoefficients`], and from there either to
//! single-excitation wavepacket transport ([`single_excitation`]) or to
//! full spin-boson dynamics by matrix-product-state evolution
//! ([`full_dynamics`]). [`config`] and [`pipeline`] drive the same steps
//! from a strict TOML run configuration.

pub mod chainmap;
pub mod config;
pub mod error;
pub mod full_dynamics;
pub mod io;
pub mod pipeline;
pub mod quad;
pub mod single_excitation;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
