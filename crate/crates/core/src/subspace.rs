//! The NPT subspace
//!
//! ```text
//! S = span{ |j⟩|k+1⟩ - |j+1⟩|k⟩ : 0 <= j <= m-2, 0 <= k <= n-2 }
//! ```
//!
//! of dimension `(m-1)(n-1)`. Under [`delta_realign`](crate::bipartite::delta_realign)
//! its image is exactly the set of `n × m` matrices whose anti-diagonals all
//! sum to zero, which is what makes every state supported on `S` NPT.

use crate::bipartite::{BipartiteDims, DensityMatrix, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{vec_dot, vec_norm, ComplexMatrix, C64};
use crate::sampling::Sampler;

/// Relative residual below which a vector counts as lying in `S`.
pub const CONTAINS_RTOL: f64 = 1e-9;

const DROP_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    dims: BipartiteDims,
    generators: Vec<Vec<C64>>,
    orthonormal: Vec<Vec<C64>>,
}

/// Builds the generators in lexicographic `(j, k)` order and orthonormalizes
/// them with twice-iterated modified Gram–Schmidt.
pub fn build_subspace(dims: BipartiteDims) -> SubspaceBasis {
    let (m, n) = (dims.m(), dims.n());
    let d = dims.total();
    let zero = C64::new(0.0, 0.0);
    let mut generators = Vec::with_capacity((m - 1) * (n - 1));
    for j in 0..m.saturating_sub(1) {
        for k in 0..n.saturating_sub(1) {
            let mut g = vec![zero; d];
            g[dims.index(j, k + 1)] = C64::new(1.0, 0.0);
            g[dims.index(j + 1, k)] = C64::new(-1.0, 0.0);
            generators.push(g);
        }
    }

    let mut orthonormal: Vec<Vec<C64>> = Vec::with_capacity(generators.len());
    for g in &generators {
        let mut w = g.clone();
        for _pass in 0..2 {
            for u in &orthonormal {
                let coef = vec_dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * coef;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > DROP_THRESHOLD {
            orthonormal.push(w.into_iter().map(|z| z / norm).collect());
        }
    }

    SubspaceBasis {
        dims,
        generators,
        orthonormal,
    }
}

impl SubspaceBasis {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn dimension(&self) -> usize {
        self.orthonormal.len()
    }

    pub fn generators(&self) -> &[Vec<C64>] {
        &self.generators
    }

    pub fn orthonormal(&self) -> &[Vec<C64>] {
        &self.orthonormal
    }

    /// `(j, k)` label of generator `idx`.
    pub fn generator_label(&self, idx: usize) -> (usize, usize) {
        let per_row = self.dims.n() - 1;
        (idx / per_row, idx % per_row)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for u in &self.orthonormal {
            let coef = vec_dot(u, v);
            for (o, ui) in out.iter_mut().zip(u) {
                *o += ui * coef;
            }
        }
        out
    }

    /// `||(I - P) v||`.
    pub fn residual(&self, v: &[C64]) -> Result<f64> {
        if v.len() != self.dims.total() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for dims ({}, {})",
                v.len(),
                self.dims.m(),
                self.dims.n()
            )));
        }
        let p = self.project(v);
        Ok(v.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn projector(&self) -> Projector {
        projector(self)
    }
}

/// Orthogonal projector onto a [`SubspaceBasis`].
#[derive(Clone, Debug)]
pub struct Projector {
    dims: BipartiteDims,
    p: ComplexMatrix,
    rank: usize,
}

impl Projector {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `I - P`.
    pub fn complement(&self) -> ComplexMatrix {
        &ComplexMatrix::identity(self.dims.total()) - &self.p
    }

    /// Wraps an arbitrary orthogonal projector. `rank` is read off the trace.
    pub fn from_matrix(dims: BipartiteDims, p: ComplexMatrix) -> Result<Self> {
        let d = dims.total();
        if p.rows() != d || p.cols() != d {
            return Err(Error::ShapeMismatch(format!("projector must be {d}x{d}")));
        }
        p.check_hermitian()?;
        let sq = p.matmul(&p);
        if (&sq - &p).frobenius_norm() > 1e-10 {
            return Err(Error::ShapeMismatch("matrix is not idempotent".into()));
        }
        let rank = p.trace().re.round() as usize;
        Ok(Self {
            dims,
            p: p.hermitian_part(),
            rank,
        })
    }
}

/// `P = Σ_b |b⟩⟨b|` over the orthonormal basis.
pub fn projector(basis: &SubspaceBasis) -> Projector {
    let d = basis.dims.total();
    let mut p = ComplexMatrix::zeros(d, d);
    for u in &basis.orthonormal {
        for i in 0..d {
            if u[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..d {
                p[(i, j)] += u[i] * u[j].conj();
            }
        }
    }
    Projector {
        dims: basis.dims,
        p: p.hermitian_part(),
        rank: basis.dimension(),
    }
}

/// `||(I - P) v|| <= 1e-9 ||v||`.
pub fn contains(basis: &SubspaceBasis, v: &[C64]) -> Result<bool> {
    let r = basis.residual(v)?;
    Ok(r <= CONTAINS_RTOL * vec_norm(v))
}

/// `||(I - P) ρ (I - P)||_F`.
pub fn range_residual(basis: &SubspaceBasis, rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != basis.dims {
        return Err(Error::ShapeMismatch("state and subspace dimensions differ".into()));
    }
    let q = projector(basis).complement();
    Ok(q.matmul(rho.matrix()).matmul(&q).frobenius_norm())
}

/// `||(I - P) ρ (I - P)||_F <= 1e-9 ||ρ||_F`.
pub fn range_in_subspace(basis: &SubspaceBasis, rho: &DensityMatrix) -> Result<bool> {
    Ok(range_residual(basis, rho)? <= CONTAINS_RTOL * rho.matrix().frobenius_norm())
}

/// Sums `s_t = Σ_{r + c = t} M[r, c]` for `t = 0 ..= rows + cols - 2`.
pub fn antidiag_sums(mat: &ComplexMatrix) -> Vec<C64> {
    let len = (mat.rows() + mat.cols()).saturating_sub(1);
    let mut sums = vec![C64::new(0.0, 0.0); len];
    for r in 0..mat.rows() {
        for c in 0..mat.cols() {
            sums[r + c] += mat[(r, c)];
        }
    }
    sums
}

/// Random mixture of `rank` unit vectors drawn from `S`: Gaussian
/// coordinates in the orthonormal basis, weights from uniform draws.
pub fn random_mixture_in_subspace(basis: &SubspaceBasis, rank: usize, seed: u64) -> Result<Ensemble> {
    if basis.dimension() == 0 {
        return Err(Error::DegenerateSubspace);
    }
    if rank == 0 {
        return Err(Error::BadRank {
            rank,
            max: basis.dims.total(),
        });
    }
    let d = basis.dims.total();
    let mut sampler = Sampler::new(seed);
    let weights: Vec<f64> = (0..rank).map(|_| sampler.uniform()).collect();
    let total: f64 = weights.iter().sum();
    let mut pairs = Vec::with_capacity(rank);
    for w in weights {
        let coords = sampler.complex_normal_vec(basis.dimension());
        let mut v = vec![C64::new(0.0, 0.0); d];
        for (g, u) in coords.iter().zip(&basis.orthonormal) {
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi += ui * g;
            }
        }
        let norm = vec_norm(&v);
        pairs.push((w / total, v.into_iter().map(|z| z / norm).collect()));
    }
    Ensemble::new(basis.dims, pairs)
}
