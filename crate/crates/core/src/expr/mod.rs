//! Exact polynomial scalars on coordinate charts and the text front end.

mod chart;
pub mod num;
mod parse;
mod scalar;

pub use chart::Chart;
pub use num::{Numeric, Rational};
pub use parse::{
    parse_document, BundleDecl, BundleKindDecl, CycleSpec, DistributionDecl, Document, Item,
    ItemValue, ManifoldSpec, ParseError, ParseErrorKind, Presentation, RingDecl, ScenarioHeader,
    Statement, parse_rational,
};
pub use scalar::{Monomial, Scalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("chart mismatch: {left} vs {right}")]
    ChartMismatch { left: String, right: String },
    #[error("unknown coordinate {coord} on chart {chart}")]
    UnknownCoordinate { chart: String, coord: String },
    #[error("duplicate coordinate {coord} on chart {chart}")]
    DuplicateCoordinate { chart: String, coord: String },
    #[error("chart {0} has no coordinates")]
    EmptyChart(String),
    #[error("expected {expected} entries, found {found}")]
    ExponentLength { expected: usize, found: usize },
}
