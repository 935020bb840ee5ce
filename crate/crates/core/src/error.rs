use thiserror::Error;

use crate::dsl::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inputs must be finite and strictly positive, got ({a}, {b})")]
    InvalidPair { a: f64, b: f64 },

    #[error("normalized argument must be finite and strictly positive, got {0}")]
    InvalidArgument(f64),

    #[error("{what} is not defined at x = {x}")]
    Domain { what: &'static str, x: f64 },

    #[error("step {step} is invalid at x = {x}: need x - step > 0 and step >= 1e-6 * max(1, x)")]
    InvalidStep { x: f64, step: f64 },

    #[error("invalid sampling strategy: {0}")]
    InvalidStrategy(String),

    #[error("evaluation failed at (a, b) = ({a}, {b}): {source}")]
    AtSample { a: f64, b: f64, source: Box<Error> },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
