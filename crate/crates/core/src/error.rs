use thiserror::Error;

/// Errors raised across the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix entries length {len} does not match {rows}x{cols}")]
    BadShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("unknown space label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate space label `{0}`")]
    DuplicateLabel(String),

    #[error("space `{0}` is not covered by any operator")]
    UncoveredSpace(String),

    #[error("space `{0}` is covered more than once")]
    DoublyCovered(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("channel is not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("empty operator list: {0}")]
    Empty(&'static str),

    #[error("vanishing normalization {0:.3e}; conditioning on an impossible event")]
    VanishingNormalization(f64),

    #[error("process matrix has no control space `C`")]
    MissingControl,

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("outcome labels differ")]
    LabelMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
