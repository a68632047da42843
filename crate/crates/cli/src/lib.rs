//! Command implementations behind the `ed-slra` binary. Every command
//! returns a [`report::RunReport`]; the binary prints it and maps failures to
//! exit codes.

pub mod eddeg;
pub mod golden;
pub mod instance;
pub mod report;
pub mod reproduce;
pub mod solve;

use std::fmt;

/// Failure classes of the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files (exit 1).
    Usage(String),
    /// A count or value differs from what was expected (exit 2).
    Mismatch(String),
    /// Anything else (exit 3).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Mismatch(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Mismatch(m) => write!(f, "expectation mismatch: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ed_slra::Error> for CliError {
    fn from(e: ed_slra::Error) -> Self {
        use ed_slra::Error as E;
        match e {
            E::InconsistentCount(_) | E::RingMismatch(_) | E::NonIntegralSeries => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
