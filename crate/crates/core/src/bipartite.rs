//! Bipartite structure on `C^m ⊗ C^n`: partial transpose, the realignment
//! of vectors into `n × m` matrices, PPT testing and random states.
//!
//! Product basis vector `|j⟩|k⟩` has index `j * n + k` throughout.

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, vec_norm, ComplexMatrix, C64};
use crate::sampling::Sampler;

/// Local dimensions `(m, n)` of `C^m ⊗ C^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    m: usize,
    n: usize,
}

impl BipartiteDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDims(format!(
                "local dimensions must be at least 1, got ({m}, {n})"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.m * self.n
    }

    /// Index of `|j⟩|k⟩`.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n + k
    }

    /// Inverse of [`Self::index`].
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    /// `(m - 1)(n - 1)`: dimension of the NPT subspace and the largest
    /// possible number of negative eigenvalues of a partial transpose.
    pub fn max_negative_count(&self) -> usize {
        (self.m - 1) * (self.n - 1)
    }

    fn check_operator(&self, a: &ComplexMatrix) -> Result<()> {
        let d = self.total();
        if a.rows() != d || a.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "expected {d}x{d} for dims ({}, {}), got {}x{}",
                self.m,
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }

    fn check_vector(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.total() {
            return Err(Error::ShapeMismatch(format!(
                "expected a vector of length {}, got {}",
                self.total(),
                v.len()
            )));
        }
        Ok(())
    }
}

/// Transpose on the second tensor factor. Entry `(i n + k, j n + l)` of the
/// result is entry `(i n + l, j n + k)` of `a`; no arithmetic is done.
pub fn partial_transpose(a: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check_operator(a)?;
    let n = dims.n;
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        a[(i * n + l, j * n + k)]
    }))
}

/// Cutoff below which an eigenvalue counts as negative:
/// `max(1e-10, 1e-9 |λ_max|)`.
pub fn negativity_threshold(lambda_max: f64) -> f64 {
    (1e-9 * lambda_max.abs()).max(1e-10)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativeEigenvalues {
    pub count: usize,
    /// Ascending.
    pub values: Vec<f64>,
    pub threshold: f64,
}

pub fn count_negative_eigenvalues(a: &ComplexMatrix) -> Result<NegativeEigenvalues> {
    let eigs = eigvalsh(a)?;
    Ok(negatives_of(&eigs))
}

/// Negative eigenvalues of an ascending spectrum under [`negativity_threshold`].
pub fn negatives_of(ascending: &[f64]) -> NegativeEigenvalues {
    let lmax = ascending.last().copied().unwrap_or(0.0);
    let threshold = negativity_threshold(lmax);
    let values: Vec<f64> = ascending.iter().copied().take_while(|&l| l < -threshold).collect();
    NegativeEigenvalues {
        count: values.len(),
        values,
        threshold,
    }
}

/// Tolerances a [`DensityMatrix`] must meet.
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_PSD_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator on `C^m ⊗ C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(dims: BipartiteDims, mat: ComplexMatrix) -> Result<Self> {
        dims.check_operator(&mat)?;
        mat.check_hermitian()?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let lmin = eigvalsh(&mat)?[0];
        if lmin < -STATE_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {lmin:.3e} is negative"
            )));
        }
        Ok(Self {
            dims,
            mat: mat.hermitian_part(),
        })
    }

    /// Projects onto the PSD cone and rescales to unit trace.
    pub fn from_rounded(dims: BipartiteDims, mat: &ComplexMatrix) -> Result<Self> {
        dims.check_operator(mat)?;
        let psd = crate::linalg::project_psd(&mat.hermitian_part())?;
        let tr = psd.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState("rounded matrix has zero trace".into()));
        }
        Self::new(dims, psd.scale(1.0 / tr))
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            mat: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(dims: BipartiteDims, v: &[C64]) -> Result<Self> {
        dims.check_vector(v)?;
        let norm = vec_norm(v);
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let u: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Ok(Self {
            dims,
            mat: ComplexMatrix::outer(&u, &u).hermitian_part(),
        })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose(&self.mat, self.dims).expect("shape checked at construction")
    }

    /// Splits into an ensemble of eigenvectors, keeping eigenvalues above
    /// `1e-10 λ_max` and renormalizing their weights.
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let spec = eigh(&self.mat)?;
        let cutoff = 1e-10 * spec.max();
        let kept: Vec<(f64, Vec<C64>)> = (0..spec.dim())
            .filter(|&k| spec.eigenvalues[k] > cutoff)
            .map(|k| (spec.eigenvalues[k], spec.vector(k)))
            .collect();
        let total: f64 = kept.iter().map(|(p, _)| p).sum();
        Ensemble::new(self.dims, kept.into_iter().map(|(p, v)| (p / total, v)).collect())
    }
}

/// PPT test: no eigenvalue of `ρ^Γ` below `-τ`.
pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    Ok(count_negative_eigenvalues(&rho.partial_transpose())?.count == 0)
}

/// Convex mixture `Σ p_i |v_i⟩⟨v_i|` of unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dims: BipartiteDims,
    pairs: Vec<(f64, Vec<C64>)>,
}

impl Ensemble {
    pub fn new(dims: BipartiteDims, pairs: Vec<(f64, Vec<C64>)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        let mut total = 0.0;
        for (i, (p, v)) in pairs.iter().enumerate() {
            if !(*p > 0.0) {
                return Err(Error::InvalidEnsemble(format!("weight {i} is {p}")));
            }
            dims.check_vector(v)?;
            let norm = vec_norm(v);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidEnsemble(format!("vector {i} has norm {norm}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { dims, pairs })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn pairs(&self) -> &[(f64, Vec<C64>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let d = self.dims.total();
        let mut mat = ComplexMatrix::zeros(d, d);
        for (p, v) in &self.pairs {
            for i in 0..d {
                let vi = v[i] * *p;
                for j in 0..d {
                    mat[(i, j)] += vi * v[j].conj();
                }
            }
        }
        DensityMatrix {
            dims: self.dims,
            mat: mat.hermitian_part(),
        }
    }
}

/// `Δ(v)`: the `n × m` matrix with `Δ(v)[k, j] = v[j n + k]`, i.e. it sends
/// `|j⟩|k⟩` to `|k⟩⟨j|`.
pub fn delta_realign(v: &[C64], dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check_vector(v)?;
    let n = dims.n;
    Ok(ComplexMatrix::from_fn(n, dims.m, |row, col| v[col * n + row]))
}

/// Inverse of [`delta_realign`].
pub fn delta_unrealign(mat: &ComplexMatrix, dims: BipartiteDims) -> Result<Vec<C64>> {
    if mat.rows() != dims.n || mat.cols() != dims.m {
        return Err(Error::ShapeMismatch(format!(
            "expected {}x{}, got {}x{}",
            dims.n,
            dims.m,
            mat.rows(),
            mat.cols()
        )));
    }
    Ok((0..dims.total())
        .map(|idx| {
            let (j, k) = dims.split(idx);
            mat[(k, j)]
        })
        .collect())
}

/// `G G† / Tr(G G†)` with `G` an `mn × rank` matrix of complex Gaussians
/// drawn column by column from the seeded sampler.
pub fn random_density_matrix(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, max: d });
    }
    let mut sampler = Sampler::new(seed);
    let columns: Vec<Vec<C64>> = (0..rank).map(|_| sampler.complex_normal_vec(d)).collect();
    let mut mat = ComplexMatrix::zeros(d, d);
    for g in &columns {
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] += g[i] * g[j].conj();
            }
        }
    }
    let tr = mat.trace().re;
    let mat = mat.scale(1.0 / tr).hermitian_part();
    Ok(DensityMatrix { dims, mat })
}
