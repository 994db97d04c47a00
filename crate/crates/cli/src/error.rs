use std::fmt::Display;

use thiserror::Error;

/// Failure of a CLI command, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or invalid input data; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Anything that went wrong while running a valid request; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Display) -> Self {
        Self::Usage(msg.to_string())
    }

    pub fn runtime(msg: impl Display) -> Self {
        Self::Runtime(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<fbox_core::Error> for CliError {
    fn from(err: fbox_core::Error) -> Self {
        use fbox_core::Error::*;
        match err {
            InvalidGrid(_) | InvalidSample(_) | LengthMismatch { .. } | InvalidParameter(_) => {
                Self::Usage(err.to_string())
            }
            _ => Self::Runtime(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a path to an I/O error.
pub(crate) fn io_error(path: &std::path::Path, err: impl Display) -> CliError {
    CliError::Runtime(format!("{}: {err}", path.display()))
}
