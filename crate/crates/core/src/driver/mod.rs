//! Command line, phase orchestration and reports.

pub mod cli;
pub mod pipeline;
pub mod preprocess;
pub mod report;
pub mod runtime;
pub mod stats;

use crate::energyrep::EnergyError;
use crate::mlopt::MlError;
use crate::profiler::ProfileError;
use crate::synthesizer::SynthError;

pub use cli::{Action, Cli, RunConfig, TrainMode};
pub use pipeline::{run, Summary};
pub use report::{emit_selection_report, render_selection_report};
pub use stats::{geomean_speedup, StatsError};

/// A failed run, tagged with the phase that failed.
#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("[config] {0}")]
    Config(String),
    #[error("[extract] {path}: {message}")]
    Extract { path: String, message: String },
    #[error("[compile] {0}")]
    Compile(String),
    #[error("[profile] {0}")]
    Profile(#[from] ProfileError),
    #[error("[model] {0}")]
    Ml(#[from] MlError),
    #[error("[link] {0}")]
    Synth(#[from] SynthError),
    #[error("[energy] {0}")]
    Energy(#[from] EnergyError),
    #[error("[io] {0}")]
    Io(String),
}
