use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes; a stable contract for scripting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// Bad input, configuration or I/O.
    User = 1,
    /// Non-convergence, invariant violation or failed acceptance check.
    Numerical = 2,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("bad state spec {spec:?}: {message}")]
    StateSpec { spec: String, message: String },
    #[error(transparent)]
    Core(#[from] qtomo_core::Error),
    #[error("density matrix violates invariant: {0}")]
    Invariant(qtomo_core::Error),
    #[error("reconstruction did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("{failed} acceptance check(s) failed")]
    ChecksFailed { failed: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Format { path: path.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io { .. } | CliError::Format { .. } | CliError::Config(_) | CliError::StateSpec { .. } => {
                ExitCode::User
            }
            CliError::Core(e) => match e {
                qtomo_core::Error::InvalidParameter(_)
                | qtomo_core::Error::EmptyInput
                | qtomo_core::Error::EmptyData
                | qtomo_core::Error::WindowOutsidePeriod
                | qtomo_core::Error::TruncationTooSmall { .. }
                | qtomo_core::Error::ZeroDimension => ExitCode::User,
                _ => ExitCode::Numerical,
            },
            CliError::Invariant(_) | CliError::NotConverged { .. } | CliError::ChecksFailed { .. } => {
                ExitCode::Numerical
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
