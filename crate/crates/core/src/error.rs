use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("shadowing sigma is zero; Fisher information scale is undefined")]
    ZeroSigma,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid planner state: {0}")]
    InvalidPlanner(String),

    #[error("matrix is not positive semidefinite (det = {det})")]
    NotPsd { det: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by a bad scenario or bad command-line input.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidChannel(_)
                | Error::ZeroSigma
                | Error::Empty(_)
                | Error::InvalidGrid(_)
                | Error::InvalidPlanner(_)
                | Error::Config(_)
        )
    }

    /// True for numerical failures.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::NotPsd { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
