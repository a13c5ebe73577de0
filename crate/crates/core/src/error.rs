use thiserror::Error;

/// Errors raised by the library. Every variant names the operation that failed.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("{op}: invalid input: {msg}")]
    Input { op: &'static str, msg: String },

    #[error("{op}: no convergence: {msg}")]
    Convergence { op: &'static str, msg: String },

    #[error("{op}: resolution too coarse: {msg}")]
    Resolution { op: &'static str, msg: String },

    #[error("{op}: integration failed: {msg}")]
    Integration { op: &'static str, msg: String },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn input(op: &'static str, msg: impl Into<String>) -> Self {
        LabError::Input { op, msg: msg.into() }
    }

    pub(crate) fn convergence(op: &'static str, msg: impl Into<String>) -> Self {
        LabError::Convergence { op, msg: msg.into() }
    }

    pub(crate) fn resolution(op: &'static str, msg: impl Into<String>) -> Self {
        LabError::Resolution { op, msg: msg.into() }
    }

    pub(crate) fn integration(op: &'static str, msg: impl Into<String>) -> Self {
        LabError::Integration { op, msg: msg.into() }
    }

    /// True for errors caused by the caller's arguments or files rather than by
    /// the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            LabError::Input { .. } | LabError::Parse { .. } | LabError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
