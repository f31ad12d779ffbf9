//! Primal–dual interior-point method for block-diagonal Hermitian LMIs.
//!
//! Solves the pair
//!
//! ```text
//! (D)  maximize  b·y     subject to  S = C - Σ_i y_i A_i ⪰ 0
//! (P)  minimize  ⟨C, X⟩  subject to  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! ```
//!
//! where every matrix is block diagonal with Hermitian blocks and
//! `⟨A, B⟩ = Re Tr(A B)`. The search direction is HKM with a Mehrotra
//! predictor–corrector and separate primal and dual step lengths; the
//! starting point is the usual infeasible scaled identity.
//!
//! Constraint matrices are usually matrix units (one or two entries), so the
//! Schur complement `M_ij = Re Tr(A_i X A_j S⁻¹)` is assembled entrywise
//! instead of through dense products.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, eigvalsh, hpd_inverse, solve_lower, ComplexMatrix, C64};

/// One block of one constraint matrix.
#[derive(Clone, Debug)]
pub(crate) enum Coeff {
    /// Hermitian matrix given by its non-zero entries (both triangles).
    Sparse(Vec<(usize, usize, C64)>),
    Dense(ComplexMatrix),
}

impl Coeff {
    pub(crate) fn zero() -> Self {
        Coeff::Sparse(Vec::new())
    }

    pub(crate) fn is_empty(&self) -> bool {
        matches!(self, Coeff::Sparse(e) if e.is_empty())
    }

    /// `Re Tr(A B)`.
    fn dot(&self, b: &ComplexMatrix) -> f64 {
        match self {
            Coeff::Sparse(entries) => entries.iter().map(|&(r, c, a)| (a * b[(c, r)]).re).sum(),
            Coeff::Dense(a) => crate::linalg::trace_of_product(a, b).re,
        }
    }

    /// `out += s * A`.
    fn add_scaled_to(&self, s: f64, out: &mut ComplexMatrix) {
        match self {
            Coeff::Sparse(entries) => {
                for &(r, c, a) in entries {
                    out[(r, c)] += a * s;
                }
            }
            Coeff::Dense(a) => out.axpy(s, a),
        }
    }

    fn frobenius_norm(&self) -> f64 {
        match self {
            Coeff::Sparse(entries) => entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt(),
            Coeff::Dense(a) => a.frobenius_norm(),
        }
    }
}

/// `maximize b·y s.t. C - Σ y_i A_i ⪰ 0`.
#[derive(Clone, Debug)]
pub(crate) struct Lmi {
    pub sizes: Vec<usize>,
    pub c: Vec<ComplexMatrix>,
    /// `a[i][block]`.
    pub a: Vec<Vec<Coeff>>,
    pub b: Vec<f64>,
}

impl Lmi {
    pub(crate) fn num_vars(&self) -> usize {
        self.b.len()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self.sizes.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        for (yi, ai) in y.iter().zip(&self.a) {
            if *yi == 0.0 {
                continue;
            }
            for (blk, coeff) in ai.iter().enumerate() {
                coeff.add_scaled_to(*yi, &mut out[blk]);
            }
        }
        out
    }

    /// `A(X)_i = Σ_blocks Re Tr(A_i X)`.
    fn apply(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|ai| ai.iter().zip(x).map(|(coeff, xb)| coeff.dot(xb)).sum())
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let blocks = self.sizes.len();
        if self.c.len() != blocks || self.a.len() != self.b.len() {
            return Err(Error::ShapeMismatch("inconsistent LMI data".into()));
        }
        for (c, &n) in self.c.iter().zip(&self.sizes) {
            if c.rows() != n || c.cols() != n {
                return Err(Error::ShapeMismatch("LMI constant block has wrong size".into()));
            }
        }
        if self.a.iter().any(|ai| ai.len() != blocks) {
            return Err(Error::ShapeMismatch("LMI coefficient has wrong block count".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IpmSettings {
    /// Stop when relative gap and both relative infeasibilities are below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IpmResult {
    pub y: Vec<f64>,
    /// Primal variable: one Lagrange multiplier per LMI block.
    pub x: Vec<ComplexMatrix>,
    pub iterations: usize,
    pub converged: bool,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
}

struct Iterate {
    x: Vec<ComplexMatrix>,
    y: Vec<f64>,
    s: Vec<ComplexMatrix>,
}

const STEP_FRACTION: f64 = 0.95;

pub(crate) fn solve(lmi: &Lmi, settings: IpmSettings) -> Result<IpmResult> {
    lmi.validate()?;
    let nvars = lmi.num_vars();
    let total_dim: usize = lmi.sizes.iter().sum();
    let norm_b = lmi.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = lmi.c.iter().map(|c| c.frobenius_norm().powi(2)).sum::<f64>().sqrt();

    let mut it = initial_point(lmi);
    let mut best: Option<(f64, IpmResult)> = None;

    for iter in 0..=settings.max_iter {
        let ax = lmi.apply(&it.x);
        let rp: Vec<f64> = lmi.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = lmi.adjoint(&it.y);
        let rd: Vec<ComplexMatrix> = (0..lmi.sizes.len())
            .map(|blk| &(&lmi.c[blk] - &it.s[blk]) - &aty[blk])
            .collect();

        let pobj: f64 = lmi.c.iter().zip(&it.x).map(|(c, x)| frob(c, x)).sum();
        let dobj: f64 = lmi.b.iter().zip(&it.y).map(|(b, y)| b * y).sum();
        let gap: f64 = it.x.iter().zip(&it.s).map(|(x, s)| frob(x, s)).sum();
        let mu = gap / total_dim as f64;

        let primal_infeas = norm(&rp) / (1.0 + norm_b);
        let dual_infeas = rd.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt() / (1.0 + norm_c);
        let rel_gap = (pobj - dobj).abs().max(gap.abs()) / (1.0 + pobj.abs() + dobj.abs());
        let merit = rel_gap.max(primal_infeas).max(dual_infeas);

        let snapshot = |converged: bool| IpmResult {
            y: it.y.clone(),
            x: it.x.clone(),
            iterations: iter,
            converged,
            rel_gap,
            primal_infeas,
            dual_infeas,
        };
        if merit <= settings.tol {
            return Ok(snapshot(true));
        }
        if best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, snapshot(false)));
        }
        if iter == settings.max_iter {
            break;
        }

        let step = match newton_step(lmi, &it, &rd, mu, nvars, total_dim) {
            Some(step) => step,
            None => break,
        };
        let (dx, dy, ds, alpha_p, alpha_d) = step;
        for (x, d) in it.x.iter_mut().zip(&dx) {
            x.axpy(alpha_p, d);
            *x = x.hermitian_part();
        }
        for (y, d) in it.y.iter_mut().zip(&dy) {
            *y += alpha_d * d;
        }
        for (s, d) in it.s.iter_mut().zip(&ds) {
            s.axpy(alpha_d, d);
            *s = s.hermitian_part();
        }
        if alpha_p.max(alpha_d) < 1e-12 {
            break;
        }
    }
    Ok(best.expect("at least one iterate evaluated").1)
}

type Step = (Vec<ComplexMatrix>, Vec<f64>, Vec<ComplexMatrix>, f64, f64);

fn newton_step(lmi: &Lmi, it: &Iterate, rd: &[ComplexMatrix], mu: f64, nvars: usize, total_dim: usize) -> Option<Step> {
    let blocks = lmi.sizes.len();
    let sinv: Vec<ComplexMatrix> = it.s.iter().map(hpd_inverse).collect::<Result<_>>().ok()?;
    let schur = schur_complement(lmi, &it.x, &sinv);
    let chol = RealCholesky::factor(schur)?;

    // A(X Rd S⁻¹) is shared by predictor and corrector.
    let x_rd_sinv: Vec<ComplexMatrix> = (0..blocks).map(|b| it.x[b].matmul(&rd[b]).matmul(&sinv[b])).collect();
    let base_rhs: Vec<f64> = lmi.b.iter().zip(lmi.apply(&x_rd_sinv)).map(|(b, a)| b + a).collect();

    let direction = |rhs: &[f64], extra: Option<&[ComplexMatrix]>, sigma_mu: f64| {
        let dy = chol.solve(rhs);
        let aty = lmi.adjoint(&dy);
        let ds: Vec<ComplexMatrix> = (0..blocks).map(|b| &rd[b] - &aty[b]).collect();
        let dx: Vec<ComplexMatrix> = (0..blocks)
            .map(|b| {
                let mut d = it.x[b].matmul(&ds[b]).matmul(&sinv[b]);
                if let Some(extra) = extra {
                    d = &d + &extra[b];
                }
                let mut out = sinv[b].scale(sigma_mu);
                out.axpy(-1.0, &it.x[b]);
                out.axpy(-1.0, &d);
                out.hermitian_part()
            })
            .collect();
        (dx, dy, ds)
    };

    // Predictor.
    let (dx_a, _, ds_a) = direction(&base_rhs, None, 0.0);
    let ap = max_step(&it.x, &dx_a).min(1.0);
    let ad = max_step(&it.s, &ds_a).min(1.0);
    let mut mu_aff = 0.0;
    for b in 0..blocks {
        let mut x = it.x[b].clone();
        x.axpy(ap, &dx_a[b]);
        let mut s = it.s[b].clone();
        s.axpy(ad, &ds_a[b]);
        mu_aff += frob(&x, &s);
    }
    mu_aff /= total_dim as f64;
    let sigma = if mu > 0.0 {
        (mu_aff / mu).max(0.0).powi(3).min(1.0)
    } else {
        0.0
    };

    // Corrector: second-order term ΔX_a ΔS_a S⁻¹.
    let second: Vec<ComplexMatrix> = (0..blocks).map(|b| dx_a[b].matmul(&ds_a[b]).matmul(&sinv[b])).collect();
    let sinv_dot = lmi.apply(&sinv);
    let second_dot = lmi.apply(&second);
    let rhs: Vec<f64> = (0..nvars)
        .map(|i| base_rhs[i] - sigma * mu * sinv_dot[i] + second_dot[i])
        .collect();
    let (dx, dy, ds) = direction(&rhs, Some(&second), sigma * mu);
    let alpha_p = (STEP_FRACTION * max_step(&it.x, &dx)).min(1.0);
    let alpha_d = (STEP_FRACTION * max_step(&it.s, &ds)).min(1.0);
    Some((dx, dy, ds, alpha_p, alpha_d))
}

fn initial_point(lmi: &Lmi) -> Iterate {
    let mut x = Vec::new();
    let mut s = Vec::new();
    for (blk, &n) in lmi.sizes.iter().enumerate() {
        let nf = n as f64;
        let mut xi = 10.0f64.max(nf.sqrt());
        let mut eta = 10.0f64.max(nf.sqrt()).max(lmi.c[blk].frobenius_norm());
        for (ai, bi) in lmi.a.iter().zip(&lmi.b) {
            let na = ai[blk].frobenius_norm();
            xi = xi.max(nf * (1.0 + bi.abs()) / (1.0 + na));
            eta = eta.max(na);
        }
        x.push(ComplexMatrix::identity(n).scale(xi));
        s.push(ComplexMatrix::identity(n).scale(eta));
    }
    Iterate {
        x,
        y: vec![0.0; lmi.num_vars()],
        s,
    }
}

/// `M_ij = Σ_blocks Re Tr(A_i X A_j S⁻¹)`.
fn schur_complement(lmi: &Lmi, x: &[ComplexMatrix], sinv: &[ComplexMatrix]) -> Vec<f64> {
    let m = lmi.num_vars();
    let mut out = vec![0.0; m * m];
    for blk in 0..lmi.sizes.len() {
        // For dense A_i, G_i = S⁻¹ A_i X so that Tr(A_i X A_j S⁻¹) = Tr(A_j G_i).
        let dense_g: Vec<Option<ComplexMatrix>> = lmi
            .a
            .iter()
            .map(|ai| match &ai[blk] {
                Coeff::Dense(a) => Some(sinv[blk].matmul(a).matmul(&x[blk])),
                Coeff::Sparse(_) => None,
            })
            .collect();
        let xb = &x[blk];
        let sb = &sinv[blk];
        for i in 0..m {
            let ai = &lmi.a[i][blk];
            if ai.is_empty() {
                continue;
            }
            for j in i..m {
                let aj = &lmi.a[j][blk];
                if aj.is_empty() {
                    continue;
                }
                let v = match (ai, aj, &dense_g[i], &dense_g[j]) {
                    (_, _, Some(gi), _) => aj.dot(gi),
                    (_, _, None, Some(gj)) => ai.dot(gj),
                    (Coeff::Sparse(ei), Coeff::Sparse(ej), None, None) => {
                        let mut acc = C64::new(0.0, 0.0);
                        for &(a, b, alpha) in ei {
                            for &(c, d, beta) in ej {
                                acc += alpha * beta * xb[(b, c)] * sb[(d, a)];
                            }
                        }
                        acc.re
                    }
                    _ => unreachable!("dense coefficients always carry G"),
                };
                out[i * m + j] += v;
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            out[i * m + j] = out[j * m + i];
        }
    }
    out
}

/// Largest `α` with `X + α ΔX ⪰ 0` (infinite if every direction is PSD).
fn max_step(x: &[ComplexMatrix], dx: &[ComplexMatrix]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let l = match cholesky(xb) {
            Ok(l) => l,
            Err(_) => return 0.0,
        };
        // L⁻¹ ΔX L⁻†
        let y = solve_lower(&l, db);
        let w = solve_lower(&l, &y.adjoint()).adjoint().hermitian_part();
        let lmin = match eigvalsh(&w) {
            Ok(e) => e[0],
            Err(_) => return 0.0,
        };
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn frob(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    crate::linalg::trace_of_product(a, b).re
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense real Cholesky for the Schur complement, with a small diagonal
/// shift retried when the matrix is numerically semidefinite.
struct RealCholesky {
    n: usize,
    l: Vec<f64>,
}

impl RealCholesky {
    fn factor(a: Vec<f64>) -> Option<Self> {
        let n = (a.len() as f64).sqrt() as usize;
        let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
        let mut shift = 0.0;
        for _ in 0..6 {
            if let Some(l) = Self::try_factor(&a, n, shift) {
                return Some(Self { n, l });
            }
            shift = if shift == 0.0 {
                1e-14 * max_diag.max(1e-300)
            } else {
                shift * 100.0
            };
        }
        None
    }

    fn try_factor(a: &[f64], n: usize, shift: f64) -> Option<Vec<f64>> {
        let mut l = a.to_vec();
        for i in 0..n {
            l[i * n + i] += shift;
        }
        for j in 0..n {
            let row_j = &mut l[j * n..(j + 1) * n];
            let d = row_j[j] - row_j[..j].iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            row_j[j] = djj;
            let row_j = row_j.to_vec();
            for i in (j + 1)..n {
                let row_i = &mut l[i * n..(i + 1) * n];
                let mut s = row_i[j];
                for k in 0..j {
                    s -= row_i[k] * row_j[k];
                }
                row_i[j] = s / djj;
            }
        }
        Some(l)
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.l;
        let mut z = b.to_vec();
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&z[..i]).map(|(a, b)| a * b).sum();
            z[i] = (z[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_unit(r: usize) -> Coeff {
        Coeff::Sparse(vec![(r, r, C64::new(1.0, 0.0))])
    }

    #[test]
    fn max_eigenvalue_as_lmi() {
        // maximize -t  s.t.  t I - W ⪰ 0   =>  t* = λ_max(W).
        let w = ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 1.0]]);
        let lmi = Lmi {
            sizes: vec![3],
            c: vec![-&w],
            a: vec![vec![Coeff::Dense(-&ComplexMatrix::identity(3))]],
            b: vec![-1.0],
        };
        let res = solve(&lmi, IpmSettings::default()).unwrap();
        assert!(res.converged);
        let lmax = *eigvalsh(&w).unwrap().last().unwrap();
        assert!((res.y[0] - lmax).abs() < 1e-7, "{} vs {lmax}", res.y[0]);
        // Multiplier is the top eigenprojector: unit trace.
        assert!((res.x[0].trace().re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn small_real_sdp_with_known_optimum() {
        // maximize y0 + y1 s.t. I - y0 E00 - y1 E11 ⪰ 0 gives y = (1, 1).
        let lmi = Lmi {
            sizes: vec![2],
            c: vec![ComplexMatrix::identity(2)],
            a: vec![vec![diag_unit(0)], vec![diag_unit(1)]],
            b: vec![1.0, 1.0],
        };
        let res = solve(&lmi, IpmSettings::default()).unwrap();
        assert!(res.converged);
        assert!((res.y[0] - 1.0).abs() < 1e-7);
        assert!((res.y[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn real_cholesky_solves() {
        let a = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let ch = RealCholesky::factor(a.clone()).unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-13);
        }
    }
}
