use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes do not conform.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A primitive produced NaN or an infinity.
    #[error("non-finite value produced by `{primitive}`")]
    NumericOverflow { primitive: &'static str },
    /// Non-finite value encountered outside a single primitive (objective, input, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A precondition of the called operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed serialized input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for the numeric failure variants.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericOverflow { .. } | Error::Numeric(_))
    }
}
