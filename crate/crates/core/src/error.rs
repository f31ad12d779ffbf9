use thiserror::Error;

use crate::bipartite::DensityMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("rank {rank} outside 1..={max}")]
    BadRank { rank: usize, max: usize },

    #[error("state is not supported on the subspace (residual {residual:.3e})")]
    NotInSubspace { residual: f64 },

    #[error("no witness found: {0}")]
    NoWitness(String),

    #[error("subspace has dimension zero")]
    DegenerateSubspace,

    #[error("operator is not in the dual cone of PPT states (min overlap {overlap:.3e})")]
    NotInDualCone { overlap: f64 },

    /// Iteration budget exhausted. `partial` carries the best rounded state
    /// when one exists so callers can still write it out.
    #[error("{stage} did not converge after {iterations} iterations: {detail}")]
    NoConvergence {
        stage: &'static str,
        iterations: usize,
        detail: String,
        partial: Option<Box<DensityMatrix>>,
    },
}
