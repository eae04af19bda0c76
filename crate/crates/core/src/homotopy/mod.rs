//! The two-stage homotopy on model open manifolds: interpolation towards a
//! closed representative under a cutoff, then pullback by a compression of
//! the manifold into a neighbourhood of its core. Each stage is checked
//! exactly where the data is polynomial and numerically in the cutoff
//! collar.

mod engine;
mod model;
mod pullback;
mod report;
mod scenario;

pub use engine::{Homotopy, PathNum};
pub use model::{sigma, smooth_step, Cutoff, CutoffValue, ModelManifold};
pub use pullback::PolyMap;
pub use report::{run_homotopy, PeriodRecord, RunOptions, VerificationReport, DEFAULT_GRID, MAX_GRID_POINTS};
pub use scenario::{check_epsilon_close, Density, EpsilonCheck, Scenario, ValidatedScenario};

use thiserror::Error;

use crate::cartan::CartanError;
use crate::poisson::PoissonError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    /// The scenario breaks one of the hypotheses the construction needs.
    #[error("{invariant}: {detail}")]
    Invalid { invariant: String, detail: String },
    #[error("map error: {0}")]
    Map(String),
    #[error("empty region: {0}")]
    EmptyRegion(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
}

impl HomotopyError {
    pub fn invalid(invariant: &str, detail: impl Into<String>) -> Self {
        HomotopyError::Invalid {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }
}
