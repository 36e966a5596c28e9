use thiserror::Error;

/// Error taxonomy shared by the whole workspace. The CLI maps these onto
/// exit codes: usage/domain -> 2, capability -> 3, internal -> 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller broke a precondition (mixed moduli, bad flag, size mismatch).
    #[error("usage error: {0}")]
    Usage(String),
    /// Mathematically undefined request (e.g. inverse of zero).
    #[error("domain error: {0}")]
    Domain(String),
    /// Input is valid but beyond the supported desk-scale bounds.
    #[error("capability error: {0}")]
    Capability(String),
    /// An internal assertion failed; indicates a broken promise or a bug.
    #[error("internal assertion: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Domain(_) => 2,
            Error::Capability(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}
