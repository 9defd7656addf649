//! Command line driver for the `biharmonic-core` solver: TOML scenario
//! files, convergence studies, and CSV and plain-text outputs.

use std::path::Path;

pub mod cli;
pub mod config;
pub mod output;
pub mod scenario;
pub mod study;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Missing or malformed input; nothing was computed.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numerical(#[from] biharmonic_core::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Output(format!("{}: {e}", path.display()))
    }

    /// 2 for bad input, 1 for failures after the input was accepted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}
