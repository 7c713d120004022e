use num_complex::Complex64;
use proptest::prelude::*;

use perturb_core::arrowhead::solve_arrowhead;
use perturb_core::bounds::{
    ellipsoid_covering_bound, k_np, opnorm_dual_lower, opnorm_lower, opnorm_pp_upper,
};
use perturb_core::ensembles::{
    goe_from, realize_spectrum, sample_goe, sample_gue, sample_subgaussian_hermitian,
    EntryDistribution, Seed, SpectrumSpec,
};
use perturb_core::matcore::io::AnyHermitian;
use perturb_core::matcore::EigDecomposition;
use perturb_core::matcore::{
    gap_exponent, hermitian_eig, lp_norm, operator_norm_exact, spectral_norm, HermitianMatrix,
    Matrix, ScalarKind, Spectrum,
};
use perturb_core::rs_solver::{build_shifted_gaps, partition, InnerSolver, RsSolver, SolveOptions};

fn vec_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_len)
}

fn square(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-5.0f64..5.0, n * n)
        .prop_map(move |v| Matrix::from_row_major(n, n, v).unwrap())
}

fn distinct_spectrum(max_n: usize) -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(0.01f64..5.0, 2..=max_n).prop_map(|steps| {
        let mut v = Vec::with_capacity(steps.len());
        let mut x = 0.0;
        for s in steps {
            x += s;
            v.push(x);
        }
        v.reverse();
        Spectrum::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_operator_norms_bound_matvec(
        (m, v) in (1usize..7).prop_flat_map(|n| (square(n), prop::collection::vec(-3.0f64..3.0, n)))
    ) {
        let mv = m.matvec(&v);
        for p in [1.0, 2.0, f64::INFINITY] {
            let op = operator_norm_exact(&m, p).unwrap();
            let lhs = lp_norm(&mv, p).unwrap();
            prop_assert!(lhs <= op * lp_norm(&v, p).unwrap() * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn norm_monotone(v in vec_strategy(30), s in 1.0f64..6.0, extra in 0.0f64..6.0) {
        let r = s + extra;
        prop_assert!(lp_norm(&v, r).unwrap() <= lp_norm(&v, s).unwrap() * (1.0 + 1e-12));
        prop_assert!(lp_norm(&v, f64::INFINITY).unwrap() <= lp_norm(&v, r).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn l2_conversion_inequality(v in vec_strategy(64), p in 2.0f64..12.0) {
        let n = v.len() as f64;
        let rhs = n.powf(1.0 / p) * lp_norm(&v, gap_exponent(p)).unwrap();
        prop_assert!(lp_norm(&v, 2.0).unwrap() <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn eig_is_bitwise_deterministic(seed in any::<u64>(), n in 2usize..12) {
        let m = sample_gue(n, Seed::new(seed, 1));
        let a = hermitian_eig(&m).unwrap();
        let b = hermitian_eig(&m).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn k_np_depends_only_on_gaps(lambda in distinct_spectrum(20), c in -50.0f64..50.0, p in 2.0f64..8.0) {
        let a = k_np(&lambda, p).unwrap();
        let b = k_np(&lambda.shifted(c), p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300));
    }

    #[test]
    fn covering_bound_monotone(a in prop::collection::vec(0.05f64..5.0, 1..10), j in 0usize..10, bump in 0.0f64..3.0, theta in 0.01f64..0.49) {
        let j = j % a.len();
        let mut b = a.clone();
        b[j] += bump;
        let e = std::f64::consts::E;
        prop_assert!(ellipsoid_covering_bound(&a, theta, e).unwrap() <= ellipsoid_covering_bound(&b, theta, e).unwrap());
    }

    #[test]
    fn opnorm_lower_below_upper(m in (2usize..8).prop_flat_map(square), seed in any::<u64>()) {
        let low2 = opnorm_dual_lower(&m, 2.0, 2, Seed::new(seed, 0)).unwrap();
        let spec = spectral_norm(&m).unwrap();
        prop_assert!(low2 <= spec * (1.0 + 1e-10));
        prop_assert!(low2 <= m.frobenius_norm() * (1.0 + 1e-12));
        for p in [1.0, f64::INFINITY] {
            let low = opnorm_lower(&m, p, p, 2, Seed::new(seed, 1)).unwrap();
            prop_assert!(low <= opnorm_pp_upper(&m, p).unwrap() * (1.0 + 1e-10));
        }
    }

    #[test]
    fn samplers_replay_and_mirror(seed in any::<u64>(), n in 2usize..10) {
        let a = sample_goe(n, Seed::new(seed, 3));
        prop_assert_eq!(&a, &sample_goe(n, Seed::new(seed, 3)));
        prop_assert!(a.matrix().is_hermitian_exact());
        let dist = EntryDistribution::TruncatedGaussian { c: 2.0 };
        let b = sample_subgaussian_hermitian(n, &dist, ScalarKind::Complex, Seed::new(seed, 4)).unwrap();
        match &b {
            AnyHermitian::Complex(h) => {
                prop_assert!(h.matrix().is_hermitian_exact());
                prop_assert!(h.matrix().max_abs() <= 2.0 * 2f64.sqrt());
            }
            AnyHermitian::Real(_) => prop_assert!(false, "expected complex"),
        }
        prop_assert_eq!(b, sample_subgaussian_hermitian(n, &dist, ScalarKind::Complex, Seed::new(seed, 4)).unwrap());
    }

    #[test]
    fn doubling_g_increases_gamma(seed in any::<u64>(), n in 2usize..40) {
        let lambda = realize_spectrum(&SpectrumSpec::linear(n, 1.0)).unwrap();
        let mut rng = Seed::new(seed, 0).rng();
        let g: Vec<f64> = goe_from(n, &mut rng).matrix().column(0)[1..].to_vec();
        prop_assume!(g.iter().any(|&x| x != 0.0));
        let g2: Vec<f64> = g.iter().map(|x| 2.0 * x).collect();
        let a = solve_arrowhead(&lambda, &g).unwrap();
        let b = solve_arrowhead(&lambda, &g2).unwrap();
        prop_assert!(b.gamma > a.gamma);
        prop_assert!(a.secular_residual.abs() <= 1e-12 * a.gamma.max(1.0));
        prop_assert!(b.secular_residual.abs() <= 1e-12 * b.gamma.max(1.0));
    }
}

fn multiscale(n: usize) -> Spectrum {
    realize_spectrum(&SpectrumSpec::multiscale(n, 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fixed_point_residual_small(seed in any::<u64>(), n in 4usize..48, complex in any::<bool>()) {
        let lambda = multiscale(n);
        let opts = SolveOptions::default();
        let tol = opts.control.tol;
        if complex {
            let e = sample_gue(n, Seed::new(seed, 5));
            let solver = RsSolver::<Complex64>::from_spectrum(lambda);
            if let Ok(r) = solver.solve_rs(&e, &opts) {
                let e21: Vec<Complex64> = e.matrix().column(0)[1..].to_vec();
                let bound = tol * (perturb_core::matcore::norm2(&e21) + 1.0);
                prop_assert!(r.fixed_point_residual.unwrap() <= bound, "{:?} > {bound}", r.fixed_point_residual);
            }
        } else {
            let e = sample_goe(n, Seed::new(seed, 5));
            let solver = RsSolver::<f64>::from_spectrum(lambda);
            if let Ok(r) = solver.solve_rs(&e, &opts) {
                let e21: Vec<f64> = e.matrix().column(0)[1..].to_vec();
                let bound = tol * (perturb_core::matcore::norm2(&e21) + 1.0);
                prop_assert!(r.fixed_point_residual.unwrap() <= bound, "{:?} > {bound}", r.fixed_point_residual);
            }
        }
    }

    #[test]
    fn resolvent_bound_under_half_certificate(seed in any::<u64>(), n in 4usize..40) {
        let lambda = multiscale(n);
        let e = sample_goe(n, Seed::new(seed, 6)).scaled(0.05);
        let eig = EigDecomposition::<f64>::from_spectrum(&lambda);
        let part = partition(&eig, &e).unwrap();
        let Ok(d) = build_shifted_gaps(&lambda, part.e11) else { return Ok(()) };
        let mut rng = Seed::new(seed, 7).rng();
        for p in [2.0, f64::INFINITY] {
            let Ok(inner) = InnerSolver::new(d.clone(), &part.e22, p, 0.5) else { continue };
            for _ in 0..100 {
                let y: Vec<f64> = goe_from(n, &mut rng).matrix().column(0)[1..].to_vec();
                let (x, _) = inner.apply_inverse(&y, 1e-14, 500).unwrap();
                let dx = inner.d.apply(&x);
                prop_assert!(lp_norm(&dx, p).unwrap() <= 2.0 * lp_norm(&y, p).unwrap() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn iteration_counts_when_strongly_contracting(seed in any::<u64>(), n in 8usize..64) {
        let lambda = multiscale(n);
        let e = sample_goe(n, Seed::new(seed, 8)).scaled(0.05);
        let opts = SolveOptions::default();
        let limit = 10.0 * (1.0 / opts.control.tol).log2();
        if let Ok(r) = RsSolver::<f64>::from_spectrum(lambda).solve_rs(&e, &opts) {
            if r.contraction_upper.is_some_and(|c| c <= 0.5) {
                prop_assert!(r.outer_iters as f64 <= limit);
                prop_assert!(r.inner_iters_total as f64 <= limit * r.outer_iters.max(1) as f64);
            }
        }
    }

    #[test]
    fn certified_solution_matches_oracle(seed in any::<u64>(), n in 3usize..40) {
        let lambda = multiscale(n);
        let e = sample_goe(n, Seed::new(seed, 9));
        let r = RsSolver::<f64>::from_spectrum(lambda.clone()).solve(&e, &SolveOptions::default()).unwrap();
        if r.leading_certified {
            let at = HermitianMatrix::from_real_diagonal(lambda.values()).add(&e);
            let (_, v) = perturb_core::matcore::top_eigenpair(&at).unwrap();
            let overlap = perturb_core::matcore::dot(&v, &r.u_tilde).abs();
            prop_assert!(1.0 - overlap <= 1e-9);
        }
    }
}

#[test]
fn small_noise_opens_half_certificate() {
    let lambda = multiscale(32);
    let e = sample_goe(32, Seed::new(0, 6)).scaled(0.05);
    let eig = EigDecomposition::<f64>::from_spectrum(&lambda);
    let part = partition(&eig, &e).unwrap();
    let d = build_shifted_gaps(&lambda, part.e11).unwrap();
    for p in [2.0, f64::INFINITY] {
        assert!(InnerSolver::new(d.clone(), &part.e22, p, 0.5).is_ok());
    }
    let r = RsSolver::<f64>::from_spectrum(lambda)
        .solve_rs(&e, &SolveOptions::default())
        .unwrap();
    assert!(r.contraction_upper.is_some_and(|c| c <= 0.5));
}
