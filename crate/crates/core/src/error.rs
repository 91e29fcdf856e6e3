use thiserror::Error;

/// Failure kinds shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A computation was refused because its predicted size is above a cap.
    #[error("capacity: {0}")]
    Capacity(String),
    /// Inputs violate an operation's precondition.
    #[error("domain: {0}")]
    Domain(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable name of the error kind, used in machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Capacity(_) => "capacity",
            Error::Domain(_) => "domain",
            Error::Parse(_) => "parse",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
