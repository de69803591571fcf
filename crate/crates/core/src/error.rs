use thiserror::Error;

/// Errors produced across the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unbounded objective: {0}")]
    Unbounded(String),
    #[error("too large for {what}: {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: u128,
        budget: u128,
    },
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::ContractViolation(message.into())
    }

    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 2,
            Error::Unbounded(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::InvariantViolation(_) => 5,
            Error::ContractViolation(_) => 6,
            Error::Format { .. } | Error::InvalidParams(_) | Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
