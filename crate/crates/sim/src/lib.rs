//! Experiment harness for the `riskbandit-core` policies: run
//! configuration, parallel replication, CSV and JSON outputs, and SVG
//! regret plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod plot;
pub mod seeds;

pub use config::{preset, RunConfig, SeedSpec};
pub use error::{Result, SimError};
pub use experiment::{run_experiment, ExperimentOutput, RunOptions};
