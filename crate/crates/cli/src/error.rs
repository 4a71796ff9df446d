use std::path::Path;

use sff_core::SffError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or input file contents.
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Numerical(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<SffError> for CliError {
    fn from(err: SffError) -> Self {
        match err {
            SffError::Parameter(_) | SffError::Unsupported(_) | SffError::Resource(_) => {
                CliError::Config(err.to_string())
            }
            SffError::Io(e) => CliError::Io(e.to_string()),
            SffError::Singular(_)
            | SffError::Numerical(_)
            | SffError::InsufficientData(_)
            | SffError::TooManyFailures { .. } => CliError::Numerical(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
