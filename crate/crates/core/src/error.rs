use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violated its documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// An argument fell outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    /// The channel carries no energy, so no beamformer or power allocation exists.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// A decomposition or factorization failed.
    #[error("numeric failure in {context}: {reason}")]
    Numeric { context: String, reason: String },

    /// A Monte Carlo trial failed; wraps the underlying error.
    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    /// A scenario or chart file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn numeric(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            reason: reason.into(),
        }
    }

    /// Name of the offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::InvalidParameter { name, .. } => Some(name),
            Error::Trial { source, .. } => source.field(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
