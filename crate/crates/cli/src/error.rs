use std::fmt;

/// Failure of a CLI command, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid configuration file or flag (exit code 2).
    Config { line: Option<usize>, message: String },
    /// Malformed or inconsistent input data (exit code 3).
    Input { source: String, line: Option<usize>, message: String },
    /// Non-finite values during a computation (exit code 4).
    Numeric(String),
    /// Filesystem and anything else (exit code 1).
    Other(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config {
            line: None,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Other(_) => 1,
            Self::Config { .. } => 2,
            Self::Input { .. } => 3,
            Self::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config { line: Some(l), message } => write!(f, "config error at line {l}: {message}"),
            Self::Config { line: None, message } => write!(f, "config error: {message}"),
            Self::Input { source, line: Some(l), message } => {
                write!(f, "input error in {source} at row {l}: {message}")
            }
            Self::Input { source, line: None, message } => write!(f, "input error in {source}: {message}"),
            Self::Numeric(m) => write!(f, "numeric failure: {m}"),
            Self::Other(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<aswd::Error> for CliError {
    fn from(e: aswd::Error) -> Self {
        match e {
            aswd::Error::Config(m) => Self::config(m),
            aswd::Error::Numeric(_) | aswd::Error::NumericOverflow { .. } => Self::Numeric(e.to_string()),
            aswd::Error::Parse { line, message } => Self::Input {
                source: "record".into(),
                line: Some(line),
                message,
            },
            aswd::Error::Shape(_) | aswd::Error::Contract(_) => Self::Input {
                source: "samples".into(),
                line: None,
                message: e.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Other(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
