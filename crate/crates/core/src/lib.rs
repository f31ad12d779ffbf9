//! Completely entangled subspaces whose states all have a non-positive
//! partial transpose, and states whose partial transpose has the largest
//! possible number of negative eigenvalues.
//!
//! On `C^m ⊗ C^n` the subspace
//! `S = span{|j⟩|k+1⟩ − |j+1⟩|k⟩}` has dimension `(m−1)(n−1)`, and every
//! state supported on it is NPT ([`witness`] produces the certificate).
//! The [`sdp`] module builds states whose partial transpose has exactly
//! `(m−1)(n−1)` negative eigenvalues.
//!
//! ```
//! use nptspace::{build_subspace, BipartiteDims};
//!
//! let dims = BipartiteDims::new(3, 4).unwrap();
//! assert_eq!(build_subspace(dims).dimension(), 6);
//! ```

pub mod bipartite;
pub mod error;
pub mod linalg;
pub mod sampling;
pub mod sdp;
pub mod stress;
pub mod subspace;
pub mod witness;

pub use bipartite::{
    count_negative_eigenvalues, partial_transpose, random_density_matrix, BipartiteDims, DensityMatrix, Ensemble,
};
pub use error::{Error, Result};
pub use linalg::{eigh, eigvalsh, ComplexMatrix, C64};
pub use subspace::{build_subspace, projector, Projector, SubspaceBasis};
pub use witness::{witness_for_state, witness_locator, WitnessCertificate};
