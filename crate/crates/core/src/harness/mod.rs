//! Experiment configuration, replication running, result files and slope fits.

mod config;
mod counterexample;
mod experiment;
mod format;
mod selftest;
mod slope;

pub use config::{ExperimentConfig, MetricsRequest, OutputPaths, FORMAT_VERSION};
pub use counterexample::{counterexample_command, CounterexampleReport};
pub use experiment::{
    diagnose_experiment, run_cell, run_experiment, Execution, SweepResult, SweepRow,
};
pub use format::{csv_header, csv_row, format_g17, results_csv, slopes_csv, write_file};
pub use selftest::{selftest, CheckOutcome};
pub use slope::{fit_loglog_slope, SlopeFit};
