//! Campaign harness behind the `gc3` command line: configuration, seeded
//! Monte Carlo runs, formula sweeps, decoder oracle checks and result rows.

mod commands;
mod config;
mod oracle;
mod output;

use thiserror::Error;

pub use commands::{
    cmd_bounds, cmd_simulate, cmd_sweep, summarize_sweep, BoundsOutput, GapEntry, SlopeFit, SparsenessEntry,
    SweepOutput, SweepSummary,
};
pub use config::ExperimentConfig;
pub use oracle::{
    check_case, cmd_oracle_check, oracle_check_sizes, sample_case, CaseFailure, ErasureDecoder, GaussianElimination,
    Mismatch, OracleCase, OracleCount, OracleReport, MAX_ORACLE_N,
};
pub use output::{Format, ResultRow, RowWriter, CSV_HEADER, CSV_VERSION_LINE};

use crate::protocol::ProtocolError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid `{field}`: {msg}")]
    Config { field: &'static str, msg: String },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    /// Usage and configuration problems, as opposed to I/O or internal faults.
    pub fn is_usage(&self) -> bool {
        matches!(self, ExperimentError::Config { .. } | ExperimentError::Protocol(_))
    }
}
