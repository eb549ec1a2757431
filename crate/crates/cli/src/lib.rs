//! Command-line front end for `qdiscord`: state files in, result records out.

use clap::{Args, ValueEnum};

pub mod commands;
pub mod input;
pub mod range;
pub mod record;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or non-physical input.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Certification(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Certification(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Cross-check every state against the brute-force sphere minimiser.
    #[arg(long)]
    pub certify: bool,
    /// Oracle grid size (hemisphere points).
    #[arg(long, default_value_t = 20_000)]
    pub grid: usize,
    /// Allowed |closed form - oracle|.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}
