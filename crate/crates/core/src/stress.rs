//! Seeded Monte Carlo property suites.
//!
//! Trial `i` uses seed `base + i` (wrapping), so outcomes do not depend on
//! the order trials run in. With the `parallel` feature trials are spread
//! over the rayon pool; [`Execution::Sequential`] forces a plain loop.

use crate::bipartite::{random_density_matrix, BipartiteDims};
use crate::error::{Error, Result};
use crate::linalg::eigvalsh;
use crate::sampling::Sampler;
use crate::subspace::{build_subspace, random_mixture_in_subspace, SubspaceBasis};
use crate::witness::witness_locator;

/// Relative cutoff for calling a mixture NPT: `λ_min(ρ^Γ) < −1e-12 λ_max(ρ^Γ)`.
pub const NPT_RTOL: f64 = 1e-12;
/// Allowed `|det + |mixture_sum|²|` for a witness certificate.
pub const WITNESS_IDENTITY_TOL: f64 = 1e-10;
/// Ensemble size for mixtures drawn from `S`, capped by `dim S`.
pub const NPT_MIXTURE_RANK: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Mixtures supported on `S` are NPT and carry a witness.
    Npt,
    /// Unrestricted states have at most `(m−1)(n−1)` negative eigenvalues
    /// after partial transpose.
    Bound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: u64,
    pub seed: u64,
    pub negative_count: usize,
    pub min_pt_eigenvalue: f64,
    /// `None` when the trial passed.
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct StressReport {
    pub suite: Suite,
    pub dims: BipartiteDims,
    pub base_seed: u64,
    pub outcomes: Vec<TrialOutcome>,
}

impl StressReport {
    pub fn trials(&self) -> usize {
        self.outcomes.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialOutcome> {
        self.outcomes.iter().filter(|o| o.failure.is_some())
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    pub fn max_negative_count(&self) -> usize {
        self.outcomes.iter().map(|o| o.negative_count).max().unwrap_or(0)
    }
}

pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

pub fn run_suite(
    suite: Suite,
    dims: BipartiteDims,
    trials: u64,
    base_seed: u64,
    execution: Execution,
) -> Result<StressReport> {
    if trials == 0 {
        return Err(Error::InvalidDims("trials must be at least 1".into()));
    }
    let basis = build_subspace(dims);
    if suite == Suite::Npt && basis.dimension() == 0 {
        return Err(Error::DegenerateSubspace);
    }
    let run = |index: u64| run_trial(suite, &basis, index, trial_seed(base_seed, index));
    let outcomes = map_trials(trials, execution, run);
    Ok(StressReport {
        suite,
        dims,
        base_seed,
        outcomes,
    })
}

#[cfg(feature = "parallel")]
fn map_trials<F>(trials: u64, execution: Execution, f: F) -> Vec<TrialOutcome>
where
    F: Fn(u64) -> TrialOutcome + Sync + Send,
{
    use rayon::prelude::*;
    match execution {
        Execution::Parallel => (0..trials).into_par_iter().map(f).collect(),
        Execution::Sequential => (0..trials).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_trials<F>(trials: u64, _execution: Execution, f: F) -> Vec<TrialOutcome>
where
    F: Fn(u64) -> TrialOutcome,
{
    (0..trials).map(f).collect()
}

/// Runs one trial. Errors from the library become trial failures.
pub fn run_trial(suite: Suite, basis: &SubspaceBasis, index: u64, seed: u64) -> TrialOutcome {
    let result = match suite {
        Suite::Npt => npt_trial(basis, seed),
        Suite::Bound => bound_trial(basis.dims(), seed),
    };
    match result {
        Ok((negative_count, min_pt_eigenvalue, failure)) => TrialOutcome {
            index,
            seed,
            negative_count,
            min_pt_eigenvalue,
            failure,
        },
        Err(e) => TrialOutcome {
            index,
            seed,
            negative_count: 0,
            min_pt_eigenvalue: f64::NAN,
            failure: Some(e.to_string()),
        },
    }
}

type TrialResult = Result<(usize, f64, Option<String>)>;

fn npt_trial(basis: &SubspaceBasis, seed: u64) -> TrialResult {
    let rank = NPT_MIXTURE_RANK.min(basis.dimension());
    let ensemble = random_mixture_in_subspace(basis, rank, seed)?;
    let rho = ensemble.density_matrix();
    let eigs = eigvalsh(&rho.partial_transpose())?;
    let (lmin, lmax) = (eigs[0], eigs[eigs.len() - 1]);
    let negatives = crate::bipartite::negatives_of(&eigs).count;
    if !(lmin < -NPT_RTOL * lmax) {
        return Ok((negatives, lmin, Some(format!("not NPT: λ_min(ρ^Γ) = {lmin:.3e}"))));
    }
    let cert = witness_locator(&ensemble, basis)?;
    let identity_err = (cert.determinant + cert.mixture_sum.norm_sqr()).abs();
    let failure = if !(cert.determinant < 0.0) {
        Some(format!("witness determinant {:.3e} is not negative", cert.determinant))
    } else if identity_err > WITNESS_IDENTITY_TOL {
        Some(format!("witness identity off by {identity_err:.3e}"))
    } else {
        None
    };
    Ok((negatives, lmin, failure))
}

fn bound_trial(dims: BipartiteDims, seed: u64) -> TrialResult {
    let rank = Sampler::new(seed).range_inclusive(1, dims.total());
    let rho = random_density_matrix(dims, rank, seed)?;
    let eigs = eigvalsh(&rho.partial_transpose())?;
    let negatives = crate::bipartite::negatives_of(&eigs).count;
    let cap = dims.max_negative_count();
    let failure = (negatives > cap).then(|| format!("{negatives} negative eigenvalues exceed {cap}"));
    Ok((negatives, eigs[0], failure))
}
