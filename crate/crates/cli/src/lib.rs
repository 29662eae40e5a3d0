//! Experiment runner for the weak-chaos laboratory: configuration parsing,
//! the registered experiments, and deterministic CSV/JSON emission.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;

pub use config::{parse_config, RunConfig, EXPERIMENTS};
pub use error::CliError;
pub use experiments::{run_experiment, EstimateOut, RunSummary};
