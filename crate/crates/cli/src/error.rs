use thiserror::Error;

/// Failures that stop a command before a normal report is produced.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input files and parameters.
    #[error("{0}")]
    Config(String),
    /// The propagation lost unitarity or a sector leaked.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ccsim_core::Error> for CliError {
    fn from(e: ccsim_core::Error) -> Self {
        match e {
            ccsim_core::Error::Leakage { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// How a command finished when it did produce its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    NumericalFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::NumericalFailure => 3,
        }
    }

    /// The more severe of the two.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (NumericalFailure, _) | (_, NumericalFailure) => NumericalFailure,
            (CheckFailed, _) | (_, CheckFailed) => CheckFailed,
            _ => Ok,
        }
    }
}
