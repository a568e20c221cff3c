//! Experiment runner: resolves a flat JSON configuration, runs one named
//! scenario and writes `energy_curve.csv`, `bounds.csv` and `summary.json`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

pub use config::{ExperimentConfig, RunConfig};
pub use error::CliError;
pub use output::{BoundRow, CurveRow, RunOutput, RunSummary};
pub use scenarios::{run, Scenario, SCENARIOS};
