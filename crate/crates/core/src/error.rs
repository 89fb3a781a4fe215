use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// A state lost positivity beyond the eigenvalue floor.
    #[error("positivity violated at t = {time}: smallest eigenvalue {min_eigenvalue:e}")]
    Positivity { time: f64, min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("detector regime violated: {0}")]
    Regime(String),

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("entropy routes disagree: relative entropy {relative:e}, entropy difference {difference:e}")]
    RouteDisagreement { relative: f64, difference: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that come from the numerics rather than from inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Positivity { .. } | Error::RouteDisagreement { .. } | Error::InvalidState(_) => {
                true
            }
            Error::Trajectory { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
