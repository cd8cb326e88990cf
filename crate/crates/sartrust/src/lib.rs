//! Experiment harness for the `sartrust-core` simulator.
//!
//! Loads a TOML experiment description, runs the scenario × model × run
//! grid in parallel and writes CSV and JSON results.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{load_config, ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, run_seed, ExperimentReport, RunRow};
pub use output::{emit_outputs, report_from_csv, Summary};
