use thiserror::Error;

#[derive(Debug, Error)]
pub enum GapwaveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("polynomial nearly vanishes on the unit circle at angle {angle} (|p| = {modulus:e})")]
    NearZeroOnCircle { angle: f64, modulus: f64 },

    #[error("non-simple zero of h near x = {x}; smooth the signal with the heat flow first")]
    NeedsHeating { x: f64 },

    #[error("refinement required: {0}")]
    NeedsRefinement(String),

    #[error("tail target {target:e} below achievable tail {achievable:e}")]
    NoSplit { target: f64, achievable: f64 },

    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GapwaveError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GapwaveError::InvalidInput(msg.into()))
}
