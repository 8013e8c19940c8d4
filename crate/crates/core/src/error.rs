use thiserror::Error;

/// Errors raised by chain construction and spectral computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A rate, coupling or parameter is outside its admissible range.
    #[error("domain error at index {index}: {message}")]
    Domain { index: usize, message: String },

    /// A parameter not tied to a chain index is out of range.
    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: &'static str, message: String },

    /// An iterative solver did not converge.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    /// The inputs are individually valid but cannot be combined.
    #[error("usage error: {0}")]
    Usage(String),

    /// A truncation or tolerance setting cannot be met.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(index: usize, message: impl Into<String>) -> Self {
        Error::Domain {
            index,
            message: message.into(),
        }
    }

    pub(crate) fn parameter(name: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
