use thiserror::Error;

/// Errors produced by channel construction, simulation and reconstruction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),

    #[error("missing measurement settings: {}", .0.join(", "))]
    MissingSettings(Vec<String>),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid probe records: {0}")]
    InvalidProbes(String),

    #[error("Fock truncation leakage {leakage:e} exceeds {limit:e}")]
    LeakageExceeded { leakage: f64, limit: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::InvalidDimension(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
