use super::ipm::{self, Coeff, Lmi};
use super::{combine, hermitian_basis, optimize_over_ppt, pt_entries, SdpOptions, Sense};
use crate::bipartite::{partial_transpose, BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, project_psd, ComplexMatrix, C64};
use crate::subspace::Projector;

/// PSD pair with `X₁ + X₂^Γ ≈ X`.
#[derive(Clone, Debug)]
pub struct DualConeSplit {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    /// `‖X₁ + X₂^Γ − X‖_F`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct ConeDecomposition {
    /// Certified upper bound on `max Tr(Pσ)` over PPT states.
    pub c: f64,
    /// `I − P/c`.
    pub x: ComplexMatrix,
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    /// `X₂ / Tr X₂`.
    pub rho: DensityMatrix,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds PSD `X₁, X₂` with `X₁ + X₂^Γ = X`.
///
/// Solves `max s` subject to `Y₂ ⪰ 0`, `X − Y₂^Γ − sI ⪰ 0`, then sets
/// `X₂ = Y₂` and `X₁ = psd(X − X₂^Γ)`. When `s ≥ 0` the split is exact up to
/// solver accuracy.
pub fn decompose_dual_cone(x: &ComplexMatrix, dims: BipartiteDims, options: SdpOptions) -> Result<DualConeSplit> {
    let big_n = dims.total();
    if x.rows() != big_n || x.cols() != big_n {
        return Err(Error::ShapeMismatch("operator has wrong size for dims".into()));
    }
    x.check_hermitian()?;
    let x = x.hermitian_part();
    if eigvalsh(&x)?[0] >= 0.0 {
        return Ok(DualConeSplit {
            x1: x,
            x2: ComplexMatrix::zeros(big_n, big_n),
            residual: 0.0,
            iterations: 0,
        });
    }

    let basis = hermitian_basis(big_n, false);
    let mut a = Vec::with_capacity(basis.len() + 1);
    for h in &basis {
        let neg: Vec<_> = h.iter().map(|&(r, c, v)| (r, c, -v)).collect();
        a.push(vec![Coeff::Sparse(neg), Coeff::Sparse(pt_entries(h, dims))]);
    }
    let identity: Vec<_> = (0..big_n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
    a.push(vec![Coeff::zero(), Coeff::Sparse(identity)]);
    let mut b = vec![0.0; a.len()];
    b[basis.len()] = 1.0;
    let lmi = Lmi {
        sizes: vec![big_n, big_n],
        c: vec![ComplexMatrix::zeros(big_n, big_n), x.clone()],
        a,
        b,
    };
    let sol = ipm::solve(&lmi, options.ipm)?;

    let x2 = project_psd(&combine(big_n, &basis, &sol.y[..basis.len()]))?;
    let x2_pt = partial_transpose(&x2, dims)?;
    let x1 = project_psd(&(&x - &x2_pt))?;
    let residual = (&(&x1 + &x2_pt) - &x).frobenius_norm();
    if residual <= options.residual {
        return Ok(DualConeSplit {
            x1,
            x2,
            residual,
            iterations: sol.iterations,
        });
    }

    let overlap = optimize_over_ppt(dims, &x, Sense::Min, options);
    match overlap {
        Ok(opt) if opt.value < 0.0 => Err(Error::NotInDualCone { overlap: opt.value }),
        _ => Err(Error::NoConvergence {
            stage: "dual cone decomposition",
            iterations: sol.iterations,
            detail: format!("residual {residual:.3e} above {:.1e}", options.residual),
            partial: None,
        }),
    }
}

/// Builds the extremal state from the dual-cone split of `I − P/c`.
///
/// `c` is the certified upper bound on `max Tr(Pσ)` over PPT states, which
/// keeps `X` inside the dual cone.
pub fn construct_via_dual_cone(
    dims: BipartiteDims,
    projector: &Projector,
    options: SdpOptions,
) -> Result<ConeDecomposition> {
    if projector.dims() != dims {
        return Err(Error::ShapeMismatch("projector dimensions differ from dims".into()));
    }
    if projector.rank() == 0 {
        return Err(Error::DegenerateSubspace);
    }
    let p = projector.matrix();
    let opt = optimize_over_ppt(dims, p, Sense::Max, options)?;
    let c = opt.bound;
    let big_n = dims.total();
    let x = &ComplexMatrix::identity(big_n) - &p.scale(1.0 / c);
    let split = decompose_dual_cone(&x, dims, options)?;
    let tr = split.x2.trace().re;
    if !(tr > 0.0) {
        return Err(Error::NoConvergence {
            stage: "dual cone decomposition",
            iterations: split.iterations,
            detail: "X₂ has zero trace".into(),
            partial: None,
        });
    }
    let rho = DensityMatrix::new(dims, split.x2.scale(1.0 / tr))?;
    Ok(ConeDecomposition {
        c,
        x,
        x1: split.x1,
        x2: split.x2,
        rho,
        residual: split.residual,
        iterations: opt.iterations + split.iterations,
    })
}
