//! Differential forms and multivector fields with polynomial coefficients.

mod calculus;
mod graded;

pub use calculus::{contract, exterior_derivative, lie_bracket, pair, schouten_bracket};
pub use graded::{DiffForm, FormKind, Graded, Kind, Multivector, VectorKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("chart mismatch: {left} vs {right}")]
    ChartMismatch { left: String, right: String },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("cannot contract a {vector}-vector into a {form}-form")]
    ContractionDegree { vector: usize, form: usize },
    #[error("bracket of two functions is undefined")]
    BracketDegree,
}
