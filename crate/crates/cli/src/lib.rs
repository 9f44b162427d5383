//! Batch front end: parse a run configuration, dispatch one experiment,
//! and emit machine-readable reports (JSON), tables (CSV) and static SVG
//! plots. Exit code 0 means success, 1 an error, 2 a failed scientific
//! check.

pub mod config;
pub mod output;
pub mod report;
pub mod runner;

pub use config::{Experiment, ModelConfig, RunConfig};
pub use runner::{run, RunOutcome, EXIT_FAILED_CHECK};
