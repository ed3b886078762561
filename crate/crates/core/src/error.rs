use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("axis groups overlap on `{0}`")]
    OverlappingAxes(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("symbol `{symbol}` of axis `{axis}` has zero probability")]
    ZeroMass { axis: String, symbol: String },

    #[error("Markov chain violated: residual {residual:e} exceeds {tolerance:e}")]
    MarkovViolation { residual: f64, tolerance: f64 },

    #[error("infeasible distortion: {0}")]
    Infeasible(String),

    #[error("outside the validity region: {0}")]
    Region(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("multiplier search failed: {0}")]
    Bracket(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
