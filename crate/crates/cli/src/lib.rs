//! Configuration, orchestration and report emission for histlab experiments.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{
    parse_config, parse_config_with_seed, render, Experiment, ExperimentConfig, ExperimentKind,
};
pub use error::CliError;
pub use report::RunManifest;
pub use run::{replay, run_experiment, ProbeReport, ReplayOutcome};
