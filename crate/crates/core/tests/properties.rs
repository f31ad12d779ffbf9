//! Property tests over random inputs.

use nptspace::bipartite::{delta_realign, delta_unrealign, negatives_of};
use nptspace::linalg::{frob_inner, kron, project_psd};
use nptspace::sampling::Sampler;
use nptspace::subspace::{antidiag_sums, random_mixture_in_subspace};
use nptspace::{
    build_subspace, eigh, eigvalsh, partial_transpose, random_density_matrix, witness_locator, BipartiteDims,
    ComplexMatrix, C64,
};
use proptest::prelude::*;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut s = Sampler::new(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| s.complex_normal())
}

fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    random_matrix(n, n, seed).hermitian_part()
}

fn dims_strategy(max: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=max, 1..=max)
}

fn spectral_error(a: &ComplexMatrix) -> (f64, f64) {
    let spec = eigh(a).unwrap();
    let n = a.rows();
    let v = ComplexMatrix::from_fn(n, n, |i, k| spec.vector(k)[i]);
    let lam = ComplexMatrix::from_diagonal(&spec.eigenvalues);
    let resid = (&a.matmul(&v) - &v.matmul(&lam)).frobenius_norm();
    let ortho = (&v.adjoint().matmul(&v) - &ComplexMatrix::identity(n)).max_abs();
    (resid, ortho)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_is_an_involution((m, n) in dims_strategy(5), seed in any::<u64>()) {
        let d = BipartiteDims::new(m, n).unwrap();
        let a = random_matrix(m * n, m * n, seed);
        let twice = partial_transpose(&partial_transpose(&a, d).unwrap(), d).unwrap();
        prop_assert_eq!(twice, a);
    }

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity((m, n) in dims_strategy(5), seed in any::<u64>()) {
        let d = BipartiteDims::new(m, n).unwrap();
        let a = random_hermitian(m * n, seed);
        let pt = partial_transpose(&a, d).unwrap();
        prop_assert_eq!(pt.trace(), a.trace());
        prop_assert!(pt.is_hermitian());
        prop_assert!((pt.frobenius_norm() - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn partial_transpose_of_product_transposes_second_factor(
        (m, n) in dims_strategy(4), seed in any::<u64>()
    ) {
        let d = BipartiteDims::new(m, n).unwrap();
        let a = random_matrix(m, m, seed);
        let b = random_matrix(n, n, seed ^ 0x5a5a);
        let pt = partial_transpose(&kron(&a, &b), d).unwrap();
        prop_assert_eq!(pt, kron(&a, &b.transpose()));
    }

    #[test]
    fn eigh_reconstructs((n, seed) in (1usize..24, any::<u64>())) {
        let a = random_hermitian(n, seed);
        let (resid, ortho) = spectral_error(&a);
        prop_assert!(resid <= 1e-11 * a.frobenius_norm().max(1.0), "residual {resid}");
        prop_assert!(ortho <= 1e-10, "orthonormality {ortho}");
    }

    #[test]
    fn eigenvalues_sum_to_trace((n, seed) in (1usize..20, any::<u64>())) {
        let a = random_hermitian(n, seed);
        let eigs = eigvalsh(&a).unwrap();
        prop_assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = eigs.iter().sum();
        prop_assert!((sum - a.trace().re).abs() <= 1e-10 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn project_psd_is_idempotent_and_psd((n, seed) in (1usize..12, any::<u64>())) {
        let a = random_hermitian(n, seed);
        let p = project_psd(&a).unwrap();
        prop_assert!(eigvalsh(&p).unwrap()[0] >= -1e-12 * (1.0 + a.frobenius_norm()));
        let pp = project_psd(&p).unwrap();
        prop_assert!(p.max_abs_diff(&pp) <= 1e-11 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn frob_inner_is_symmetric_for_hermitian((n, seed) in (1usize..10, any::<u64>())) {
        let a = random_hermitian(n, seed);
        let b = random_hermitian(n, seed.wrapping_add(1));
        let ab = frob_inner(&a, &b).unwrap();
        let ba = frob_inner(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
    }

    #[test]
    fn delta_round_trips((m, n) in dims_strategy(6), seed in any::<u64>()) {
        let d = BipartiteDims::new(m, n).unwrap();
        let v = Sampler::new(seed).complex_normal_vec(m * n);
        let back = delta_unrealign(&delta_realign(&v, d).unwrap(), d).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn subspace_members_have_vanishing_antidiagonals((m, n) in dims_strategy(6), seed in any::<u64>()) {
        let d = BipartiteDims::new(m, n).unwrap();
        let basis = build_subspace(d);
        prop_assert_eq!(basis.dimension(), (m - 1) * (n - 1));
        prop_assume!(basis.dimension() > 0);
        let ens = random_mixture_in_subspace(&basis, 1, seed).unwrap();
        let v = &ens.pairs()[0].1;
        let sums = antidiag_sums(&delta_realign(v, d).unwrap());
        prop_assert_eq!(sums.len(), m + n - 1);
        prop_assert!(sums.iter().all(|s| s.norm() <= 1e-12));
    }

    #[test]
    fn projector_is_orthogonal_with_rank_dim_s((m, n) in dims_strategy(5)) {
        let p = build_subspace(BipartiteDims::new(m, n).unwrap()).projector();
        let mat = p.matrix();
        prop_assert!((&mat.matmul(mat) - mat).max_abs() <= 1e-10);
        prop_assert!(mat.max_abs_diff(&mat.adjoint()) <= 1e-10);
        prop_assert!((mat.trace().re - ((m - 1) * (n - 1)) as f64).abs() <= 1e-10);
    }

    #[test]
    fn mixtures_on_subspace_are_npt_with_witness(
        (m, n) in (2usize..=5, 2usize..=5), rank in 1usize..=4, seed in any::<u64>()
    ) {
        let d = BipartiteDims::new(m, n).unwrap();
        let basis = build_subspace(d);
        let rank = rank.min(basis.dimension());
        let ens = random_mixture_in_subspace(&basis, rank, seed).unwrap();
        let pt = ens.density_matrix().partial_transpose();
        let eigs = eigvalsh(&pt).unwrap();
        prop_assert!(eigs[0] < -1e-12 * eigs[eigs.len() - 1]);
        let cert = witness_locator(&ens, &basis).unwrap();
        prop_assert!(cert.determinant < 0.0);
        prop_assert!((cert.determinant + cert.mixture_sum.norm_sqr()).abs() <= 1e-10);
        // The certificate's submatrix is read from ρ^Γ.
        let (ia, ib) = (d.index(cert.alpha.0, cert.alpha.1), d.index(cert.beta.0, cert.beta.1));
        prop_assert_eq!(cert.submatrix[0][0], pt[(ia, ia)]);
        prop_assert_eq!(cert.submatrix[0][1], pt[(ia, ib)]);
        prop_assert_eq!(cert.submatrix[1][1], pt[(ib, ib)]);
        prop_assert!(cert.min_eigenvalue() >= eigs[0] - 1e-12);
    }

    #[test]
    fn random_states_respect_negative_eigenvalue_bound(
        (m, n) in (1usize..=4, 1usize..=5), seed in any::<u64>()
    ) {
        let d = BipartiteDims::new(m, n).unwrap();
        let rank = Sampler::new(seed).range_inclusive(1, m * n);
        let rho = random_density_matrix(d, rank, seed).unwrap();
        let neg = negatives_of(&eigvalsh(&rho.partial_transpose()).unwrap());
        prop_assert!(neg.count <= d.max_negative_count());
        prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn eigh_accuracy_on_large_matrices() {
    for n in [64, 100, 144] {
        for seed in 0..3 {
            let a = random_hermitian(n, seed);
            let (resid, ortho) = spectral_error(&a);
            assert!(resid <= 1e-11 * a.frobenius_norm().max(1.0), "n={n} residual {resid}");
            assert!(ortho <= 1e-10, "n={n} orthonormality {ortho}");
        }
    }
}

#[test]
fn singlet_partial_transpose_spectrum() {
    // ρ = |ψ⁻⟩⟨ψ⁻| has ρ^Γ with eigenvalues {−1/2, 1/2, 1/2, 1/2}.
    let d = BipartiteDims::new(2, 2).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ];
    let rho = ComplexMatrix::outer(&v, &v);
    let eigs = eigvalsh(&partial_transpose(&rho, d).unwrap()).unwrap();
    for (got, want) in eigs.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
        assert!((got - want).abs() < 1e-14);
    }
}
