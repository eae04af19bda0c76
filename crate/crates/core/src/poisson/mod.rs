//! Regular bivectors, distributions and foliations: rank and image, the
//! correspondence between regular bivectors and leafwise nondegenerate
//! 2-forms, the Poisson predicate, Frobenius involutivity and leafwise
//! closedness.

mod bivector;
mod distribution;
mod pair;
mod probe;
mod record;

pub use bivector::{
    bivector_matrix, poisson_check, rank_and_image, sharp_map, MinorCertificate, PoissonVerdict,
    RegularBivector, RegularityStatus,
};
pub use distribution::{involutivity_check, Distribution, Foliation, InvolutivityVerdict, Presentation};
pub use pair::{
    defining_identity_holds, from_pair, gram_matrix, leafwise_closed_check, regular_poisson_check,
    to_pair, FoliatedForm, LeafwiseVerdict, RegularPoissonReport, RegularPoissonVerdict, Route,
};
pub use probe::{CheckConfig, DEFAULT_SEED, NUM_PROBES};
pub use record::{format_point, VerdictRecord};

use thiserror::Error;

use crate::cartan::CartanError;
use crate::expr::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("chart mismatch: expected {expected}, found {found}")]
    ChartMismatch { expected: String, found: String },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("rank varies: {} at {}, {} at {}", .first.1, format_point(&.first.0), .second.1, format_point(&.second.0))]
    NotRegular {
        first: (Vec<Rational>, usize),
        second: (Vec<Rational>, usize),
    },
    #[error("expected rank {expected}, found {found} at {}", format_point(.point))]
    RankDeficient {
        expected: usize,
        found: usize,
        point: Vec<Rational>,
    },
    #[error("form is degenerate on the distribution at {}", format_point(.point))]
    Degenerate { point: Vec<Rational> },
    #[error("unsupported in the exact layer: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
}
