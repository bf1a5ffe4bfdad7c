use thiserror::Error;

use crate::Point;

/// Errors raised by the problem, discretization, and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("field `{field}` evaluated to {value} at {witness:?}")]
    Evaluator { field: String, value: f64, witness: Vec<f64> },

    #[error("field `{field}` left its declared range [{min}, {max}] with value {value} at {witness:?}")]
    DeclaredBound { field: String, min: f64, max: f64, value: f64, witness: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pair weight between nodes {i} and {j} is not finite ({weight})")]
    PairWeight { i: usize, j: usize, weight: f64 },

    #[error("numeric error in {context}: {detail}")]
    Numeric { context: String, detail: String },

    #[error("mountain-pass geometry failure: {0}")]
    Geometry(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn numeric(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numeric { context: context.into(), detail: detail.into() }
    }

    pub(crate) fn evaluator(field: &str, value: f64, witness: &[Point]) -> Self {
        Error::Evaluator { field: field.to_string(), value, witness: witness.iter().flat_map(|p| p.iter().copied()).collect() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
