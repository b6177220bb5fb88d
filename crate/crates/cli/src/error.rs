use std::io;
use std::path::Path;

use atomflux::{AtomError, FitError, OracleError, SpectraError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 2 config, 3 I/O, 4 fit, 5 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Fit(_) => 4,
            CliError::Validation(_) => 5,
        }
    }

    pub fn io(context: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io {
            context: context.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<AtomError> for CliError {
    fn from(e: AtomError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Io(source) => CliError::Io {
                context: "trajectory dump".into(),
                source,
            },
            other => CliError::Config(other.to_string()),
        }
    }
}
