use super::ipm::{self, Coeff, Lmi};
use super::{combine, hermitian_basis, negate, pt_entries, SdpOptions};
use crate::bipartite::{partial_transpose, BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, project_psd, trace_of_product, ComplexMatrix};
use crate::subspace::Projector;

/// Reported `d` when the projector is zero and `d` is unbounded.
pub const D_MAX: f64 = 1e6;

#[derive(Clone, Debug)]
pub struct SdpResiduals {
    /// `max(0, −λ_min(ρ))` before rounding.
    pub psd_gap: f64,
    /// `max(0, λ_max(ρ^Γ − I + dP))` on the rounded state.
    pub pt_constraint_gap: f64,
    /// `|Tr ρ − 1|` on the rounded state.
    pub trace_gap: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub d: f64,
    /// Certified upper bound on the optimal `d`.
    pub d_upper_bound: f64,
    pub rho: DensityMatrix,
    pub residuals: SdpResiduals,
    pub iterations: usize,
    pub converged: bool,
    /// Set when `P = 0` and `d` was clamped to [`D_MAX`].
    pub degenerate: bool,
}

/// Maximizes `d` subject to `ρ ⪰ 0`, `Tr ρ = 1`, `ρ^Γ ⪯ I − dP`.
///
/// The state is parametrized as `ρ = I/N + Σ r_k E_k` over a traceless
/// Hermitian basis, so the trace constraint is implicit. The returned state
/// is rounded to the PSD cone and `d` is lowered until the rounded state
/// satisfies the constraint to `options.feasibility`.
pub fn solve_construction_sdp(dims: BipartiteDims, projector: &Projector, options: SdpOptions) -> Result<SdpSolution> {
    if projector.dims() != dims {
        return Err(Error::ShapeMismatch("projector dimensions differ from dims".into()));
    }
    let big_n = dims.total();
    let p = projector.matrix();
    if projector.rank() == 0 {
        let rho = DensityMatrix::maximally_mixed(dims);
        return Ok(SdpSolution {
            d: D_MAX,
            d_upper_bound: f64::INFINITY,
            residuals: SdpResiduals {
                psd_gap: 0.0,
                pt_constraint_gap: pt_gap(&rho.partial_transpose(), p, D_MAX)?,
                trace_gap: 0.0,
            },
            rho,
            iterations: 0,
            converged: true,
            degenerate: true,
        });
    }

    let basis = hermitian_basis(big_n, true);
    let rho0 = ComplexMatrix::identity(big_n).scale(1.0 / big_n as f64);
    let mut a = Vec::with_capacity(basis.len() + 1);
    a.push(vec![Coeff::zero(), Coeff::Dense(p.clone())]);
    for e in &basis {
        a.push(vec![Coeff::Sparse(negate(e)), Coeff::Sparse(pt_entries(e, dims))]);
    }
    let mut b = vec![0.0; a.len()];
    b[0] = 1.0;
    let lmi = Lmi {
        sizes: vec![big_n, big_n],
        c: vec![rho0.clone(), &ComplexMatrix::identity(big_n) - &rho0],
        a,
        b,
    };
    let sol = ipm::solve(&lmi, options.ipm)?;

    let raw = &rho0 + &combine(big_n, &basis, &sol.y[1..]);
    let psd_gap = (-eigvalsh(&raw)?[0]).max(0.0);
    let rho = DensityMatrix::from_rounded(dims, &raw)?;
    let rho_pt = rho.partial_transpose();
    let d = certify_d(&rho_pt, p, sol.y[0], options.feasibility)?;
    let d_upper_bound = upper_bound(&sol.x[1], p, dims)?;

    let residuals = SdpResiduals {
        psd_gap,
        pt_constraint_gap: pt_gap(&rho_pt, p, d)?,
        trace_gap: (rho.matrix().trace().re - 1.0).abs(),
    };
    let converged = sol.converged && d_upper_bound - d <= options.gap;
    if !converged {
        return Err(Error::NoConvergence {
            stage: "construction sdp",
            iterations: sol.iterations,
            detail: format!(
                "d = {d:.6e}, upper bound {d_upper_bound:.6e}, relative gap {:.2e}, infeasibility {:.2e}/{:.2e}",
                sol.rel_gap, sol.primal_infeas, sol.dual_infeas
            ),
            partial: Some(Box::new(rho)),
        });
    }
    Ok(SdpSolution {
        d,
        d_upper_bound,
        rho,
        residuals,
        iterations: sol.iterations,
        converged,
        degenerate: false,
    })
}

fn pt_gap(rho_pt: &ComplexMatrix, p: &ComplexMatrix, d: f64) -> Result<f64> {
    let mut m = rho_pt.clone();
    m.axpy(d, p);
    m = &m - &ComplexMatrix::identity(m.rows());
    Ok(eigvalsh(&m)?.last().copied().unwrap_or(0.0).max(0.0))
}

/// Largest `d ≤ d_solver` (to bisection accuracy) with
/// `λ_max(ρ^Γ + dP − I) ≤ tol`. The gap is nondecreasing in `d` and vanishes
/// at `d = 0`, so bisection is valid.
fn certify_d(rho_pt: &ComplexMatrix, p: &ComplexMatrix, d_solver: f64, tol: f64) -> Result<f64> {
    let d_solver = d_solver.max(0.0);
    if pt_gap(rho_pt, p, d_solver)? <= tol {
        return Ok(d_solver);
    }
    let (mut lo, mut hi) = (0.0, d_solver);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if pt_gap(rho_pt, p, mid)? <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Weak-duality bound from the multiplier `Z ⪰ 0` of the constraint
/// `I − ρ^Γ − dP ⪰ 0`: `d Tr(ZP) ≤ Tr Z − λ_min(Z^Γ)` for every feasible
/// state, so any PSD `Z` with `Tr(ZP) > 0` gives a valid bound.
fn upper_bound(z: &ComplexMatrix, p: &ComplexMatrix, dims: BipartiteDims) -> Result<f64> {
    let z = project_psd(&z.hermitian_part())?;
    let zp = trace_of_product(&z, p).re;
    if !(zp > 0.0) {
        return Ok(f64::INFINITY);
    }
    let z = z.scale(1.0 / zp);
    let lmin = eigh(&partial_transpose(&z, dims)?)?.min();
    Ok(z.trace().re - lmin)
}
