use std::fmt::Write as _;

use nptspace::bipartite::{negatives_of, partial_transpose, STATE_PSD_TOL, STATE_TRACE_TOL};
use nptspace::subspace::CONTAINS_RTOL;
use nptspace::{build_subspace, eigvalsh, BipartiteDims, ComplexMatrix, DensityMatrix, Result};
use serde::Serialize;

use crate::format::fmt6;

/// Tolerances used by `verify`. `hermitian = None` means the scale-relative
/// default of the matrix.
#[derive(Clone, Copy, Debug)]
pub struct VerifyTolerances {
    pub hermitian: Option<f64>,
    pub psd: f64,
    pub trace: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            hermitian: None,
            psd: STATE_PSD_TOL,
            trace: STATE_TRACE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Thresholds {
    pub hermitian: f64,
    pub psd: f64,
    pub trace: f64,
    /// Cutoff below which an eigenvalue of the partial transpose is negative.
    pub negativity: f64,
    /// Relative residual allowed for the range check; absent without `--subspace`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace: Option<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerificationReport {
    pub m: usize,
    pub n: usize,
    pub is_hermitian: bool,
    pub hermitian_deviation: f64,
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub trace: [f64; 2],
    pub unit_trace: bool,
    pub negative_count: usize,
    /// Ascending.
    pub negative_eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range_in_subspace: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_residual: Option<f64>,
    pub thresholds: Thresholds,
}

impl VerificationReport {
    /// Hermitian, PSD and unit trace.
    pub fn is_state(&self) -> bool {
        self.is_hermitian && self.is_psd && self.unit_trace
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain JSON");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let yn = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(s, "dimensions      {} x {}", self.m, self.n);
        let _ = writeln!(
            s,
            "hermitian       {} (deviation {}, tolerance {})",
            yn(self.is_hermitian),
            fmt6(self.hermitian_deviation),
            fmt6(self.thresholds.hermitian)
        );
        let _ = writeln!(
            s,
            "psd             {} (min eigenvalue {}, tolerance {})",
            yn(self.is_psd),
            fmt6(self.min_eigenvalue),
            fmt6(self.thresholds.psd)
        );
        let _ = writeln!(
            s,
            "trace           {} + {}i (unit within {}: {})",
            fmt6(self.trace[0]),
            fmt6(self.trace[1]),
            fmt6(self.thresholds.trace),
            yn(self.unit_trace)
        );
        let values: Vec<String> = self.negative_eigenvalues.iter().map(|&v| fmt6(v)).collect();
        let _ = writeln!(
            s,
            "negatives       {} below -{}: [{}]",
            self.negative_count,
            fmt6(self.thresholds.negativity),
            values.join(", ")
        );
        if let (Some(inside), Some(res)) = (self.range_in_subspace, self.subspace_residual) {
            let _ = writeln!(s, "range in S      {} (residual {})", yn(inside), fmt6(res));
        }
        s
    }
}

pub fn verify_matrix(
    dims: BipartiteDims,
    a: &ComplexMatrix,
    tolerances: VerifyTolerances,
    check_subspace: bool,
) -> Result<VerificationReport> {
    let herm_tol = tolerances.hermitian.unwrap_or_else(|| a.hermitian_tolerance());
    let deviation = a.hermitian_deviation();
    let is_hermitian = deviation <= herm_tol;
    let h = a.hermitian_part();
    let eigs = eigvalsh(&h)?;
    let min_eigenvalue = eigs[0];
    let trace = a.trace();
    let unit_trace = (trace.re - 1.0).abs() <= tolerances.trace && trace.im.abs() <= tolerances.trace;
    let neg = negatives_of(&eigvalsh(&partial_transpose(&h, dims)?)?);

    let (range_in_subspace, subspace_residual, subspace_tol) = if check_subspace {
        let basis = build_subspace(dims);
        let complement = basis.projector().complement();
        let residual = complement.matmul(&h).frobenius_norm();
        let inside = residual <= CONTAINS_RTOL * h.frobenius_norm();
        (Some(inside), Some(residual), Some(CONTAINS_RTOL))
    } else {
        (None, None, None)
    };

    Ok(VerificationReport {
        m: dims.m(),
        n: dims.n(),
        is_hermitian,
        hermitian_deviation: deviation,
        is_psd: min_eigenvalue >= -tolerances.psd,
        min_eigenvalue,
        trace: [trace.re, trace.im],
        unit_trace,
        negative_count: neg.count,
        negative_eigenvalues: neg.values,
        range_in_subspace,
        subspace_residual,
        thresholds: Thresholds {
            hermitian: herm_tol,
            psd: tolerances.psd,
            trace: tolerances.trace,
            negativity: neg.threshold,
            subspace: subspace_tol,
        },
    })
}

/// Convenience for library states.
pub fn verify_state(rho: &DensityMatrix, check_subspace: bool) -> Result<VerificationReport> {
    verify_matrix(rho.dims(), rho.matrix(), VerifyTolerances::default(), check_subspace)
}
