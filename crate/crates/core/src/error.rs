use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision of {0} decimal digits is below the supported minimum of 30")]
    InvalidPrecision(u32),

    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("invalid decay profile: {0}")]
    InvalidProfile(String),

    #[error("planning constants are undefined for {0}")]
    UnsupportedDecayClass(String),

    #[error("budget too small: N = {budget}, {reason}")]
    BudgetTooSmall { budget: u64, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("transform on axis {axis} requires a {required} domain")]
    DomainMismatch { axis: usize, required: &'static str },

    #[error("no decay detected on axis {axis} ({direction} ray) within {limit} points")]
    NoDecayDetected {
        axis: usize,
        direction: &'static str,
        limit: u64,
    },

    #[error("integrand carries no {0}")]
    MissingEvaluator(&'static str),

    #[error("rate fit needs at least 3 usable records, got {0}")]
    InsufficientPoints(usize),

    #[error("rate fit rejected: relative errors are zero or precision-limited")]
    ZeroErrors,

    #[error("rate fit rejected: regressor values have no spread")]
    DegenerateFit,

    #[error("unknown integrand `{0}`")]
    UnknownIntegrand(String),

    #[error("invalid dimension count {0}")]
    InvalidDims(usize),

    #[error("cannot parse `{input}` as a real number")]
    ParseReal { input: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn budget(budget: u64, reason: impl Into<String>) -> Self {
        Error::BudgetTooSmall {
            budget,
            reason: reason.into(),
        }
    }
}
