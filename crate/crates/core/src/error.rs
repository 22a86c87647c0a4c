use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("mask is empty")]
    EmptyMask,

    #[error("need at least {needed} occupied columns for the margin fit, got {got}")]
    Underdetermined { needed: usize, got: usize },

    #[error("x = {x} lies outside the polynomial domain [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("both classes must be present")]
    SingleClass,

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
