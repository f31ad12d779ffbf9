//! Negative-determinant 2×2 witness for states supported on the NPT subspace.
//!
//! Write each ensemble member as a coefficient matrix `M_i[j, k] = ⟨jk|v_i⟩`
//! (rows are the first factor). Take the first anti-diagonal `t*` that is
//! non-zero in some `M_i` and walk it from the largest row index down. The
//! first non-zero position gives `a_i`; the first later position whose
//! weighted overlap `Σ p_i conj(a_i) d_i` is non-zero gives `b_i`. Because
//! every anti-diagonal of a vector in `S` sums to zero such a position always
//! exists. With `a` at `(r_a, c_a)` and `b` at `(r_b, c_b)` (`r_b < r_a`),
//! the principal submatrix of `ρ^Γ` on `|r_b⟩|c_a⟩, |r_a⟩|c_b⟩` is
//!
//! ```text
//! [ 0                     Σ p_i a_i conj(b_i) ]
//! [ Σ p_i conj(a_i) b_i   Σ p_i |c_i|^2       ]
//! ```
//!
//! whose determinant `-|Σ p_i conj(a_i) b_i|^2` is negative.

use crate::bipartite::{DensityMatrix, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::subspace::{range_residual, SubspaceBasis, CONTAINS_RTOL};

/// Entries at or below this magnitude are treated as zero.
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCertificate {
    /// `(j₀, k₀)`: first-factor and second-factor labels of the top-left index.
    pub alpha: (usize, usize),
    /// `(j₁, k₁)` with `j₀ < j₁`, `k₀ < k₁`.
    pub beta: (usize, usize),
    /// `j + k` of the anti-diagonal holding `a` and `b`.
    pub antidiag_index: usize,
    /// Principal submatrix of `ρ^Γ` at `{alpha, beta}`.
    pub submatrix: [[C64; 2]; 2],
    pub determinant: f64,
    /// `Σ p_i conj(a_i) b_i`.
    pub mixture_sum: C64,
}

impl WitnessCertificate {
    /// Smaller eigenvalue of the 2×2 submatrix; an upper bound on `λ_min(ρ^Γ)`.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.submatrix[0][0].re;
        let d = self.submatrix[1][1].re;
        let b = self.submatrix[0][1].norm();
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }
}

/// Locates the witness for an ensemble whose members all lie in `S`.
pub fn witness_locator(ensemble: &Ensemble, basis: &SubspaceBasis) -> Result<WitnessCertificate> {
    if ensemble.dims() != basis.dims() {
        return Err(Error::ShapeMismatch("ensemble and subspace dimensions differ".into()));
    }
    for (_, v) in ensemble.pairs() {
        let residual = basis.residual(v)?;
        if residual > CONTAINS_RTOL * crate::linalg::vec_norm(v) {
            return Err(Error::NotInSubspace { residual });
        }
    }
    let rho_pt = ensemble.density_matrix().partial_transpose();
    search(ensemble, &rho_pt)
}

/// Same search for a state given as a matrix. The ensemble is its spectral
/// decomposition restricted to eigenvalues above `1e-10 λ_max`, projected
/// onto `S`; the submatrix is read from `ρ^Γ` itself.
pub fn witness_for_state(rho: &DensityMatrix, basis: &SubspaceBasis) -> Result<WitnessCertificate> {
    let residual = range_residual(basis, rho)?;
    if residual > CONTAINS_RTOL * rho.matrix().frobenius_norm() {
        return Err(Error::NotInSubspace { residual });
    }
    let raw = rho.to_ensemble()?;
    let mut pairs = Vec::with_capacity(raw.len());
    for (p, v) in raw.pairs() {
        let pv = basis.project(v);
        let norm = crate::linalg::vec_norm(&pv);
        if norm <= ZERO_TOL {
            continue;
        }
        pairs.push((*p, pv.into_iter().map(|z| z / norm).collect::<Vec<_>>()));
    }
    if pairs.is_empty() {
        return Err(Error::NoWitness("state has no component in the subspace".into()));
    }
    let total: f64 = pairs.iter().map(|(p, _)| p).sum();
    let pairs = pairs.into_iter().map(|(p, v)| (p / total, v)).collect();
    let ensemble = Ensemble::new(rho.dims(), pairs)?;
    search(&ensemble, &rho.partial_transpose())
}

fn search(ensemble: &Ensemble, rho_pt: &ComplexMatrix) -> Result<WitnessCertificate> {
    let dims = ensemble.dims();
    let (m, n) = (dims.m(), dims.n());
    let pairs = ensemble.pairs();
    let coef = |v: &[C64], j: usize, k: usize| v[dims.index(j, k)];

    // Rows on anti-diagonal t, largest first.
    let rows_on = |t: usize| -> Vec<usize> {
        let hi = t.min(m - 1);
        let lo = t.saturating_sub(n - 1);
        (lo..=hi).rev().collect()
    };

    let t_star = (0..m + n - 1)
        .find(|&t| {
            rows_on(t)
                .iter()
                .any(|&j| pairs.iter().any(|(_, v)| coef(v, j, t - j).norm() > ZERO_TOL))
        })
        .ok_or_else(|| Error::NoWitness("every ensemble member is numerically zero".into()))?;

    let rows = rows_on(t_star);
    let entries: Vec<Vec<C64>> = pairs
        .iter()
        .map(|(_, v)| rows.iter().map(|&j| coef(v, j, t_star - j)).collect())
        .collect();

    let j0 = (0..rows.len())
        .find(|&pos| entries.iter().any(|e| e[pos].norm() > ZERO_TOL))
        .expect("anti-diagonal t* has a non-zero entry");

    let overlap = |pos: usize| -> C64 {
        pairs
            .iter()
            .zip(&entries)
            .map(|((p, _), e)| e[j0].conj() * e[pos] * *p)
            .sum()
    };
    let (j1, mixture_sum) = ((j0 + 1)..rows.len())
        .map(|pos| (pos, overlap(pos)))
        .find(|(_, s)| s.norm() > ZERO_TOL)
        .ok_or_else(|| {
            let sums: Vec<String> = ((j0 + 1)..rows.len())
                .map(|pos| format!("{:.3e}", overlap(pos).norm()))
                .collect();
            Error::NoWitness(format!(
                "anti-diagonal {t_star}: no overlap above {ZERO_TOL:e} after position {j0} (|sums| = [{}])",
                sums.join(", ")
            ))
        })?;

    let (ra, ca) = (rows[j0], t_star - rows[j0]);
    let (rb, cb) = (rows[j1], t_star - rows[j1]);
    let alpha = (rb, ca);
    let beta = (ra, cb);
    let ia = dims.index(alpha.0, alpha.1);
    let ib = dims.index(beta.0, beta.1);
    let submatrix = [
        [rho_pt[(ia, ia)], rho_pt[(ia, ib)]],
        [rho_pt[(ib, ia)], rho_pt[(ib, ib)]],
    ];
    let determinant = (submatrix[0][0] * submatrix[1][1] - submatrix[0][1] * submatrix[1][0]).re;
    Ok(WitnessCertificate {
        alpha,
        beta,
        antidiag_index: t_star,
        submatrix,
        determinant,
        mixture_sum,
    })
}
