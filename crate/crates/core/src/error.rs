use thiserror::Error;

use crate::realfmt::ParseError;

/// Errors produced by the library.
///
/// Variants map onto the CLI's runtime-error exit code; usage errors are
/// caught by argument parsing before any of these can occur.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} is {actual}, limit is {limit}")]
    CapacityExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("sampling failure: no size-{k} error with full support after {attempts} attempts")]
    SamplingFailure { k: usize, attempts: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(what: &'static str, message: impl ToString) -> Self {
        Error::Format {
            what,
            message: message.to_string(),
        }
    }

    /// Wraps the error with a description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any [`Error::Context`] layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
