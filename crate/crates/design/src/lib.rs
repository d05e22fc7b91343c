//! Config-driven experiment runner for rare-variant study design.
//!
//! A run reads one JSON [`ExperimentConfig`], evaluates the selected mode
//! with `rvas-core`, and writes tidy CSV tables plus a `manifest.json`
//! listing a checksum for every file.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod run;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use exec::RayonExecutor;
pub use run::{run_experiment, RunReport};
