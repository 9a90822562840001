use thiserror::Error;

/// Errors raised by the solvers and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("edge contamination: {0}")]
    EdgeContamination(String),

    #[error("outside validity of the approximation: {0}")]
    OutOfValidity(String),

    #[error("degenerate eigenproblem: {0}")]
    Degenerate(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
