//! Characteristic classes in truncated polynomial cohomology rings, Bott's
//! vanishing criterion for Pontryagin rings of normal bundles and the
//! cohomological condition under which every distribution is homotopic to a
//! foliation.

mod bott;
mod bundle;
mod haefliger;
mod ring;

pub use bott::{
    bott_criterion, bott_example_pipeline, pontryagin_ring, BottReport, BottVerdict, BundleRow, CriterionRecord,
    IdentityCheck, PontMonomial, PontPiece,
};
pub use bundle::{
    complexification, conjugate, euler_of_complexification, line_op, pontryagin_from_chern, tensor_with_line,
    whitney_quotient, whitney_sum, BundleDescriptor, BundleKind, LineOp,
};
pub use haefliger::{haefliger_corollary_check, CohomologyData, HaefligerReason, HaefligerVerdict};
pub use ring::{CohomElement, CohomRing};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharClassError {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },
    #[error("expected a {expected} bundle, found a {found} one")]
    KindMismatch { expected: &'static str, found: &'static str },
    #[error("expected a complex line bundle, found a {kind} bundle of rank {rank}")]
    NotLine { kind: &'static str, rank: usize },
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("invalid total class: {0}")]
    InvalidTotalClass(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
