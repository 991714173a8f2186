use std::path::Path;

use thiserror::Error;

/// Command failure with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input data (exit code 2).
    #[error("{0}")]
    Data(String),
    /// Invalid or mismatched configuration (exit code 3).
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }
}

impl From<cdci_core::Error> for CliError {
    fn from(err: cdci_core::Error) -> Self {
        if err.is_config() {
            CliError::Config(err.to_string())
        } else {
            CliError::Data(err.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
