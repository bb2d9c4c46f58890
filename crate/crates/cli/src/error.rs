use std::fmt;

use minksum_core::error::Error;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input, schema violation or bad flag combination.
    Schema(String),
    /// Error reported by an engine.
    Engine(Error),
    /// The answer failed a self-check.
    Internal(String),
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 4,
            CliError::Internal(_) => 5,
            CliError::Engine(e) => match e {
                Error::Infeasible | Error::AllInfinite | Error::NoSuchValue => 2,
                Error::RankOutOfRange { .. } => 3,
                _ => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "{m}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}
