//! Experiment runner: BER sweeps, sum-rate sweeps, branch-and-bound
//! complexity profiles and lookup-table export, written as CSV with a JSON
//! metadata sidecar.

pub mod config;
pub mod run;

use thiserror::Error;

pub use config::{resolve, Args, ExperimentConfig};
pub use run::{execute, run, RunOutput};

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration; exit status 1.
    #[error("{0}")]
    Usage(String),
    /// Failure while running or writing results; exit status 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn cap(what: &str, value: usize, cap: usize) -> Self {
        CliError::Usage(format!("{what} = {value} exceeds the cap of {cap}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<onebit_precoding::Error> for CliError {
    fn from(e: onebit_precoding::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
