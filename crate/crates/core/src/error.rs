use std::path::PathBuf;

use chrono::NaiveDate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input in {context}: {message}")]
    Malformed { context: String, message: String },

    #[error("invalid config at `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("untrainable day {date}: {reason}")]
    Untrainable { date: NaiveDate, reason: String },

    #[error("training diverged (non-finite loss at epoch {epoch}, lambda={lambda}, lr={learning_rate})")]
    Divergence { epoch: usize, lambda: f64, learning_rate: f64 },

    #[error("date arithmetic overflow: {0}")]
    DateOverflow(String),

    #[error("date mismatch between reports and ground truth: {0}")]
    DateMismatch(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn malformed(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Malformed { context: context.into(), message: message.to_string() }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig { field: field.into(), message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Untrainable { .. } => 2,
            Error::Malformed { .. } | Error::InvalidConfig { .. } | Error::DateMismatch(_) | Error::DateOverflow(_) => {
                3
            }
            Error::Io { .. } | Error::Divergence { .. } => 1,
        }
    }
}
