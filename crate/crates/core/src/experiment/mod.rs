//! Experiment orchestration: configuration, runners and result persistence.

pub mod config;
pub mod runners;

pub use config::{ExperimentConfig, ResolvedExperiment};
pub use crate::folding::scaled_circuit;
pub use runners::{
    record_to_toml, run_calibration_report, run_extrapolation, run_sweep, run_vqe,
    write_manifest, write_output,
};
