//! Semidefinite programs behind the construction.
//!
//! * [`solve_construction_sdp`]: maximize `d` over states with `ρ^Γ ⪯ I − dP`.
//! * [`optimize_over_ppt`]: extremize `Tr(Wσ)` over PPT states.
//! * [`decompose_dual_cone`]: write `X = X₁ + X₂^Γ` with `X₁, X₂ ⪰ 0`.
//! * [`construct_via_dual_cone`]: the chain `c → X = I − P/c → ρ = X₂/Tr X₂`.
//!
//! All four are posed as block-diagonal LMIs and handed to the interior-point
//! solver in [`ipm`]. Every reported number is re-derived from the rounded
//! output with a dense eigendecomposition.

mod cone;
mod construction;
pub(crate) mod ipm;
mod ppt;

pub use cone::{construct_via_dual_cone, decompose_dual_cone, ConeDecomposition, DualConeSplit};
pub use construction::{solve_construction_sdp, SdpResiduals, SdpSolution, D_MAX};
pub use ipm::IpmSettings;
pub use ppt::{optimize_over_ppt, PptOptimum, Sense};

use crate::bipartite::BipartiteDims;
use crate::linalg::{ComplexMatrix, C64};

/// Tolerances and budgets shared by the SDP drivers.
#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub ipm: IpmSettings,
    /// Allowed `λ_max(ρ^Γ + dP − I)` on the rounded state.
    pub feasibility: f64,
    /// Allowed distance between reported `d` and the certified upper bound.
    pub gap: f64,
    /// Allowed distance between a PPT optimum and its certified bound.
    pub value_gap: f64,
    /// Allowed `‖X₁ + X₂^Γ − X‖_F`.
    pub residual: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            ipm: IpmSettings::default(),
            feasibility: 1e-7,
            gap: 1e-4,
            value_gap: 1e-5,
            residual: 1e-7,
        }
    }
}

type Entries = Vec<(usize, usize, C64)>;

/// Orthonormal basis of Hermitian `N × N` matrices as sparse entry lists.
///
/// With `traceless` the diagonal part is `E_jj − E_{N−1,N−1}` for `j < N−1`
/// (not orthonormal, but linearly independent), otherwise `E_jj` for all `j`.
fn hermitian_basis(n: usize, traceless: bool) -> Vec<Entries> {
    let one = C64::new(1.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    if traceless {
        for j in 0..n.saturating_sub(1) {
            out.push(vec![(j, j, one), (n - 1, n - 1, -one)]);
        }
    } else {
        for j in 0..n {
            out.push(vec![(j, j, one)]);
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            out.push(vec![(a, b, C64::new(s, 0.0)), (b, a, C64::new(s, 0.0))]);
            out.push(vec![(a, b, C64::new(0.0, s)), (b, a, C64::new(0.0, -s))]);
        }
    }
    out
}

/// Partial transpose of a sparse operator: swaps the second-factor indices
/// of row and column.
fn pt_entries(entries: &[(usize, usize, C64)], dims: BipartiteDims) -> Entries {
    let n = dims.n();
    entries
        .iter()
        .map(|&(r, c, v)| {
            let (i, l) = (r / n, r % n);
            let (j, k) = (c / n, c % n);
            (i * n + k, j * n + l, v)
        })
        .collect()
}

fn negate(entries: &[(usize, usize, C64)]) -> Entries {
    entries.iter().map(|&(r, c, v)| (r, c, -v)).collect()
}

/// `Σ_k y_k B_k` for sparse basis elements.
fn combine(n: usize, basis: &[Entries], y: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for (entries, &yk) in basis.iter().zip(y) {
        for &(r, c, v) in entries {
            out[(r, c)] += v * yk;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::partial_transpose;

    #[test]
    fn hermitian_basis_spans_and_is_hermitian() {
        let n = 4;
        for traceless in [false, true] {
            let basis = hermitian_basis(n, traceless);
            assert_eq!(basis.len(), if traceless { n * n - 1 } else { n * n });
            for b in &basis {
                let m = combine(n, std::slice::from_ref(b), &[1.0]);
                assert!(m.is_hermitian());
                if traceless {
                    assert!(m.trace().norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sparse_partial_transpose_matches_dense() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        for b in hermitian_basis(6, false) {
            let dense = combine(6, std::slice::from_ref(&b), &[1.0]);
            let sparse = combine(6, &[pt_entries(&b, dims)], &[1.0]);
            assert_eq!(partial_transpose(&dense, dims).unwrap(), sparse);
        }
    }
}
