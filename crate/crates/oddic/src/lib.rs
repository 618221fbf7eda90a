//! Fixtures, file formats and command drivers for the ODDI-C simulator.
//!
//! The numerics live in `oddic-core`; this crate loads configurations and
//! bundled fixtures, runs the experiments and writes their CSV/JSON output.

pub mod config;
pub mod fixtures;
pub mod output;
pub mod runner;

use oddic_core::consensus::ConsensusError;
use oddic_core::experiments::ExperimentError;

pub use config::{load_config, ConfigError, LoadedConfig};
pub use fixtures::FixtureError;
pub use output::{write_outputs, ExperimentOutput, OutputError};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// 2 for anything wrong with the inputs, 3 for failures while running
    /// or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Experiment(ExperimentError::Consensus(ConsensusError::NonFiniteState { .. }))
            | Error::Output(_) => EXIT_RUNTIME,
            _ => EXIT_CONFIG,
        }
    }
}
