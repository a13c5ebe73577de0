use loewner_core::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("check: {0}")]
    CheckFailed(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Lab(e) if e.is_input_error() => 2,
            CliError::Lab(_) | CliError::CheckFailed(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
