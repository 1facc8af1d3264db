use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// A matrix or scalar argument violates a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical operation failed (singular matrix, non-positive denominator, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 1 for configuration problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse(_) | Error::Io(_) => 1,
            Error::Domain(_) | Error::Numerical(_) => 2,
        }
    }
}
