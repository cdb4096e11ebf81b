use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of a formula (for example `r <= 0` at the axis).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive integration gave up. `last` holds the last accepted `(s, r, V, alpha)`.
    #[error("integration failed at s = {}: {reason}", last[0])]
    Integration { reason: String, last: [f64; 4] },

    /// A solution could not be constructed (for example no turning point before `r_max`).
    #[error("construction failed: {0}")]
    Construction(String),

    /// A curve could not be rewritten as a graph over `r`.
    #[error("reparametrization failed: {0}")]
    Reparametrization(String),

    /// A requested radius or parameter range lies outside the computed data.
    #[error("range error: {0}")]
    Range(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("fit failed: {0}")]
    Fit(String),

    /// The data does not follow the asymptotic model (typically a mismatched dimension).
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// A sweep precondition is violated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
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
        Error::Parse(e.to_string())
    }
}
