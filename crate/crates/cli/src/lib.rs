//! Command-line driver: `check`, `run`, and `compare` over edge-list graphs.
//!
//! Exit codes are stable: 0 success, 1 input error, 2 hypothesis violation,
//! 3 non-convergence, 4 matrix/agent mismatch.

pub mod commands;
pub mod config;
pub mod report;

use clap::Parser;
use thiserror::Error;

pub use config::{Cli, Command, ExperimentArgs, ExperimentConfig, Mode};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("did not converge within {steps} steps (disagreement {disagreement:e})")]
    NonConvergence { steps: usize, disagreement: f64 },
    #[error("matrix and agent traces diverge at step {step}, node {node}: {matrix:?} vs {agents:?}")]
    Mismatch {
        step: usize,
        node: usize,
        matrix: f64,
        agents: f64,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Hypothesis(_) => 2,
            CliError::NonConvergence { .. } => 3,
            CliError::Mismatch { .. } => 4,
        }
    }
}

impl From<wconsensus_core::Error> for CliError {
    fn from(err: wconsensus_core::Error) -> Self {
        use wconsensus_core::Error as E;
        match err {
            E::NotStronglyConnected
            | E::NotUndirected
            | E::Uncertified { .. }
            | E::NotPositive { .. }
            | E::RankDeficiency { .. }
            | E::NullResidual { .. } => CliError::Hypothesis(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the selected command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::dispatch(&cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
