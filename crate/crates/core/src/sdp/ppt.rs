use super::ipm::{self, Coeff, Lmi};
use super::{combine, hermitian_basis, negate, pt_entries, SdpOptions};
use crate::bipartite::{partial_transpose, BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, project_psd, trace_of_product, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug)]
pub struct PptOptimum {
    /// `Tr(Wσ)` at the returned feasible state.
    pub value: f64,
    /// Certified bound on the optimum: an upper bound for [`Sense::Max`],
    /// a lower bound for [`Sense::Min`].
    pub bound: f64,
    pub sigma: DensityMatrix,
    pub iterations: usize,
}

impl PptOptimum {
    pub fn gap(&self) -> f64 {
        (self.bound - self.value).abs()
    }
}

/// Extremizes `Re Tr(Wσ)` over `σ ⪰ 0`, `σ^Γ ⪰ 0`, `Tr σ = 1`.
///
/// The returned state is exactly feasible: it is rounded to the PSD cone and
/// mixed with `I/N` just enough to make its partial transpose PSD.
pub fn optimize_over_ppt(
    dims: BipartiteDims,
    w: &ComplexMatrix,
    sense: Sense,
    options: SdpOptions,
) -> Result<PptOptimum> {
    if w.rows() != dims.total() || w.cols() != dims.total() {
        return Err(Error::ShapeMismatch("objective has wrong size for dims".into()));
    }
    w.check_hermitian()?;
    let w = w.hermitian_part();
    let signed = match sense {
        Sense::Max => w.clone(),
        Sense::Min => -&w,
    };
    let big_n = dims.total();
    let basis = hermitian_basis(big_n, true);
    let rho0 = ComplexMatrix::identity(big_n).scale(1.0 / big_n as f64);

    let mut a = Vec::with_capacity(basis.len());
    let mut b = Vec::with_capacity(basis.len());
    for e in &basis {
        a.push(vec![
            Coeff::Sparse(negate(e)),
            Coeff::Sparse(negate(&pt_entries(e, dims))),
        ]);
        b.push(e.iter().map(|&(r, c, v)| (v * signed[(c, r)]).re).sum());
    }
    let lmi = Lmi {
        sizes: vec![big_n, big_n],
        c: vec![rho0.clone(), rho0.clone()],
        a,
        b,
    };
    let sol = ipm::solve(&lmi, options.ipm)?;

    let raw = &rho0 + &combine(big_n, &basis, &sol.y);
    let sigma = make_ppt(dims, &raw)?;
    let value = trace_of_product(&w, sigma.matrix()).re;

    // For any PSD Y and PPT σ: Tr(Wσ) = Tr((W + Y^Γ)σ) − Tr(Y σ^Γ) ≤ λ_max(W + Y^Γ).
    let y2 = project_psd(&sol.x[1].hermitian_part())?;
    let shifted = &signed + &partial_transpose(&y2, dims)?;
    let signed_bound = *eigvalsh(&shifted)?.last().expect("non-empty");
    let bound = match sense {
        Sense::Max => signed_bound,
        Sense::Min => -signed_bound,
    };

    let out = PptOptimum {
        value,
        bound,
        sigma,
        iterations: sol.iterations,
    };
    if !sol.converged || out.gap() > options.value_gap {
        return Err(Error::NoConvergence {
            stage: "ppt optimization",
            iterations: sol.iterations,
            detail: format!("value {value:.6e}, certified bound {bound:.6e}"),
            partial: Some(Box::new(out.sigma)),
        });
    }
    Ok(out)
}

/// Rounds `raw` to a state and mixes in `I/N` until the partial transpose
/// has no negative eigenvalue.
fn make_ppt(dims: BipartiteDims, raw: &ComplexMatrix) -> Result<DensityMatrix> {
    let sigma = DensityMatrix::from_rounded(dims, raw)?;
    let lmin = eigvalsh(&sigma.partial_transpose())?[0];
    if lmin >= 0.0 {
        return Ok(sigma);
    }
    let big_n = dims.total() as f64;
    // (1 − t) λ_min + t/N = 0, nudged so rounding cannot leave it negative.
    let t = ((-lmin) / (1.0 / big_n - lmin) * (1.0 + 1e-9)).min(1.0);
    let mixed = &sigma.matrix().scale(1.0 - t) + &ComplexMatrix::identity(dims.total()).scale(t / big_n);
    DensityMatrix::new(dims, mixed)
}
