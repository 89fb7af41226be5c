use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hurwitz: {0}")]
    NotHurwitz(String),

    #[error("no stabilizing Riccati solution: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("wiring error, unresolved signals: {}", .0.join(", "))]
    Wiring(Vec<String>),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("no stabilizing controller: {0}")]
    NoController(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config error in {path}: {reason}")]
    Config { path: String, reason: String },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::Wiring(_)
                | Error::Topology(_)
                | Error::Config { .. }
                | Error::Io { .. }
                | Error::Dimension(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
