//! Hermitian eigendecomposition.
//!
//! The matrix is reduced to Hermitian tridiagonal form by Householder
//! reflections, the complex sub-diagonal phases are moved into the basis so
//! the tridiagonal becomes real symmetric, and that is diagonalised with the
//! implicit-shift QL iteration (the `tql2` scheme from EISPACK / JAMA).

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with column-orthonormal eigenvectors.
///
/// Each eigenvector is scaled so that its largest-magnitude component is
/// real and positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V f(Λ) V†`, made exactly Hermitian.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * w;
                if vi.re == 0.0 && vi.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        out.hermitian_part()
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(a: &ComplexMatrix) -> Result<Spectrum> {
    a.check_hermitian()?;
    let n = a.rows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let mut work = a.hermitian_part();
    let tri = tridiagonalize(&mut work, true);
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    // Row `i` of `zt` is column `i` of the QL rotation accumulator.
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, Some(&mut zt), 30 * n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));

    let qd = tri.basis.expect("basis requested");
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let z = &zt[src * n..(src + 1) * n];
        for r in 0..n {
            let row = qd.row(r);
            let mut acc = C64::new(0.0, 0.0);
            for (q, &zi) in row.iter().zip(z) {
                acc += q * zi;
            }
            vecs[(r, col)] = acc;
        }
    }
    normalize_phases(&mut vecs);
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        eigenvectors: vecs,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.check_hermitian()?;
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work = a.hermitian_part();
    let tri = tridiagonalize(&mut work, false);
    let mut d = tri.diag;
    let mut e = tri.offdiag;
    tql2(&mut d, &mut e, None, 30 * n)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `offdiag[i]` couples `i` and `i + 1`; the last slot is zero.
    offdiag: Vec<f64>,
    /// Unitary `Q D` with `A = (Q D) T (Q D)†` and `T` real.
    basis: Option<ComplexMatrix>,
}

fn tridiagonalize(h: &mut ComplexMatrix, want_basis: bool) -> Tridiagonal {
    let n = h.rows();
    let mut q = want_basis.then(|| ComplexMatrix::identity(n));
    let zero = C64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let tail_norm_sq: f64 = (start + 1..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail_norm_sq == 0.0 {
            continue;
        }
        let alpha = h[(start, k)];
        let xnorm = (alpha.norm_sqr() + tail_norm_sq).sqrt();
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let beta = -phase * xnorm;
        // H = I - tau v v†, with H x = beta e_1.
        for i in start..n {
            v[i] = h[(i, k)];
        }
        v[start] -= beta;
        let vnorm_sq: f64 = (start..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;

        // Column k and row k collapse onto the first reflected entry.
        h[(start, k)] = beta;
        h[(k, start)] = beta.conj();
        for i in (start + 1)..n {
            h[(i, k)] = zero;
            h[(k, i)] = zero;
        }

        // Trailing block: A <- A - v q† - q v†, q = p - K v, p = tau A v.
        for i in start..n {
            let mut acc = zero;
            for j in start..n {
                acc += h[(i, j)] * v[j];
            }
            p[i] = acc * tau;
        }
        let vp: C64 = (start..n).map(|i| v[i].conj() * p[i]).sum();
        let kappa = 0.5 * tau * vp.re;
        for i in start..n {
            p[i] -= v[i] * kappa;
        }
        for i in start..n {
            for j in start..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                h[(i, j)] -= upd;
            }
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q H
            for r in 0..n {
                let mut s = zero;
                for i in start..n {
                    s += q[(r, i)] * v[i];
                }
                let s = s * tau;
                for i in start..n {
                    q[(r, i)] -= s * v[i].conj();
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut offdiag = vec![0.0; n];
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for i in 0..n.saturating_sub(1) {
        let e = h[(i + 1, i)];
        let r = e.norm();
        offdiag[i] = r;
        phases[i + 1] = if r > 0.0 { phases[i] * (e / r) } else { phases[i] };
    }
    let basis = q.map(|mut q| {
        for r in 0..n {
            for (c, ph) in phases.iter().enumerate() {
                q[(r, c)] *= ph;
            }
        }
        q
    });
    Tridiagonal { diag, offdiag, basis }
}

/// Implicit QL on a real symmetric tridiagonal. On return `d` holds the
/// eigenvalues (unsorted) and row `i` of `zt` the matching eigenvector of
/// the tridiagonal.
fn tql2(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>, budget: usize) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let mut iterations = 0usize;
    e[n - 1] = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            loop {
                iterations += 1;
                if iterations > budget {
                    return Err(Error::NoConvergence {
                        stage: "eigh",
                        iterations: budget,
                        detail: "QL iteration budget exhausted".into(),
                        partial: None,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let h = zi1[k];
                            zi1[k] = s * zi[k] + c * h;
                            zi[k] = c * zi[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn normalize_phases(v: &mut ComplexMatrix) {
    let n = v.rows();
    for col in 0..v.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..n {
            let a = v[(r, col)].norm();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if best_abs <= 0.0 {
            continue;
        }
        let rot = v[(best, col)].conj() / best_abs;
        for r in 0..n {
            v[(r, col)] *= rot;
        }
        v[(best, col)] = C64::new(v[(best, col)].re, 0.0);
    }
}
