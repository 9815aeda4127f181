use std::path::Path;

use hornlab_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{path}: {source}")]
    Input { path: String, source: std::io::Error },

    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),

    #[error("write failed: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn input(path: &Path, source: std::io::Error) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 usage, 2 refusal, 3 internal failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } | CliError::Format { .. } => 1,
            CliError::Core(e) => match e {
                Error::NotQuantile(_) | Error::MalformedSubset(_) | Error::Parse(_) => 1,
                Error::OutOfRange(_) | Error::SizeCap { .. } | Error::Precondition(_) | Error::ShiftRegime(_) => 2,
                Error::Numerical(_) | Error::Invariant(_) => 3,
            },
            CliError::Output(_) | CliError::Csv(_) => 3,
        }
    }
}
