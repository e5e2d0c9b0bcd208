use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration did not converge (last iterate {last}, residual {residual:e})")]
    NonConvergence { last: Complex64, residual: f64 },

    #[error("pole refinement left frequency band {expected} and converged in band {found} (value {value})")]
    BandEscape {
        expected: i64,
        found: i64,
        value: Complex64,
    },

    #[error("complex pole k={k}: {source}")]
    Ladder { k: usize, source: Box<Error> },

    #[error("multiple pole at {0}: residue formula requires simple poles")]
    MultiplePole(Complex64),

    #[error("base frequency band: {0}")]
    BaseBand(String),

    #[error("truncated series division by a series with zero leading coefficient")]
    ZeroLeadingDivisor,

    #[error("truncated series use different expansion variables")]
    IncompatibleVariable,

    #[error("expression swell: segment {segment} has {terms} monomials (limit {limit})")]
    ExpressionSwell { segment: usize, terms: usize, limit: usize },

    #[error("t = {t} lies outside the method-of-steps horizon [0, {horizon}]")]
    HorizonExceeded { t: f64, horizon: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
