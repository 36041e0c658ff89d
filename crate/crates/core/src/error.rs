use thiserror::Error;

/// Errors surfaced by every module of the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range (e.g. precision too small).
    #[error("configuration error: {0}")]
    Config(String),

    /// The input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The call violates a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// The computation would exceed a configured resource cap.
    #[error("resource error: {what} requires {required_bits} bits, cap is {cap_bits}")]
    Resource {
        what: String,
        required_bits: u64,
        cap_bits: u64,
    },

    /// A persisted artifact failed validation.
    #[error("integrity error at {location}: {reason}")]
    Integrity { location: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn integrity(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Integrity {
            location: location.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's input rather than by a
    /// computation or an I/O failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Config(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
