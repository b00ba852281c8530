use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Unsupported parameters or an inconsistent experiment setup.
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A payload or candidate space that does not fit the code.
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("invalid message: {0}")]
    InvalidMessage(String),
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Capacity(_) => "capacity",
            Error::InvalidMessage(_) => "invalid_message",
            Error::Estimation(_) => "estimation",
            Error::Io(_) => "io",
        }
    }
}
