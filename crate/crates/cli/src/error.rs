use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    /// 1 is reserved for "ran, but a check failed"; 2 is clap's usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 3,
            Self::Validation(_) => 4,
            Self::Cap(_) => 5,
            Self::Io(_) => 6,
            Self::Runtime(_) => 7,
        }
    }
}

impl From<seqcorr::Error> for CliError {
    fn from(e: seqcorr::Error) -> Self {
        match e {
            seqcorr::Error::CapExceeded(_) => Self::Cap(e.to_string()),
            seqcorr::Error::SvdNonConvergence { .. } => Self::Runtime(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
