//! Independent cross-checks: every quantity is recomputed by a second route.

use approx::assert_relative_eq;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use perturb_core::arrowhead::{lower_bound_check, solve_arrowhead};
use perturb_core::bounds::{davis_kahan_bound, gap_vector, rs_sin_theta_bound, MuVector};
use perturb_core::ensembles::{
    arrowhead_matrix, realize_spectrum, sample_arrowhead_noise, sample_goe, sample_gue, Seed,
    SpectrumSpec,
};
use perturb_core::matcore::eigen::solver;
use perturb_core::matcore::{
    dot, eigenvalues, hermitian_eig, hermitian_eig_with, norm2, spectral_norm, top_eigenpair,
    EigOptions, HermitianMatrix, Matrix,
};
use perturb_core::rs_solver::{verify_shifted_domination, RsSolver, SolveOptions};

#[test]
fn householder_matches_jacobi() {
    let opts = EigOptions::default();
    for (k, n) in [2usize, 5, 9, 16, 24].into_iter().enumerate() {
        let real = sample_goe(n, Seed::new(100, k as u64));
        let cplx = sample_gue(n, Seed::new(101, k as u64));
        let a = hermitian_eig_with(solver("householder-ql").unwrap(), &real, &opts).unwrap();
        let b = hermitian_eig_with(solver("jacobi").unwrap(), &real, &opts).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!(
                (x - y).abs() <= 1e-11 * (1.0 + x.abs()),
                "n={n}: {x} vs {y}"
            );
        }
        let a = hermitian_eig_with(solver("householder-ql").unwrap(), &cplx, &opts).unwrap();
        let b = hermitian_eig_with(solver("jacobi").unwrap(), &cplx, &opts).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!(
                (x - y).abs() <= 1e-11 * (1.0 + x.abs()),
                "n={n}: {x} vs {y}"
            );
        }
        // Top eigenvectors agree up to phase.
        let ov = dot(&a.vector(0), &b.vector(0)).norm();
        assert!(1.0 - ov < 1e-10);
    }
}

#[test]
fn reconstruction_sixteen() {
    let m = sample_gue(16, Seed::new(7, 7));
    let eig = hermitian_eig(&m).unwrap();
    let back = eig.reconstruct();
    let err = back.sub(m.matrix()).frobenius_norm() / m.matrix().frobenius_norm();
    assert!(err <= 1e-11, "relative reconstruction error {err:e}");
    let gram = eig.basis.adjoint_matmul(&eig.basis);
    assert!(gram.sub(&Matrix::identity(16)).max_abs() <= 1e-12);
}

#[test]
fn goe_edge_near_two_sqrt_n() {
    let n = 400;
    let mut tops = Vec::new();
    for t in 0..5 {
        let e = sample_goe(n, Seed::new(5, t));
        tops.push(eigenvalues(&e).unwrap()[0] / (n as f64).sqrt());
    }
    let m = tops.iter().sum::<f64>() / tops.len() as f64;
    assert!((m - 2.0).abs() < 0.1, "mean edge {m}");
}

fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> Matrix<Complex64> {
    let mut u = Matrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    for j in 0..n {
        let mut col = u.column(j);
        for k in 0..j {
            let prev = u.column(k);
            let c = dot(&prev, &col);
            for (x, p) in col.iter_mut().zip(&prev) {
                *x -= c * p;
            }
        }
        let nrm = norm2(&col);
        col.iter_mut().for_each(|x| *x /= nrm);
        u.set_column(j, &col);
    }
    u
}

#[test]
fn gue_unitary_invariance() {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let u = random_unitary(n, &mut rng);
    let (mut plain, mut rotated) = (Vec::new(), Vec::new());
    let mut offdiag = Vec::new();
    for t in 0..50 {
        plain.extend(eigenvalues(&sample_gue(n, Seed::new(1, t))).unwrap());
        let x = sample_gue(n, Seed::new(2, t));
        let r = u.adjoint_matmul(&x.matrix().matmul(&u));
        let h = HermitianMatrix::from_upper(&r);
        offdiag.push(h[(0, 1)].norm_sqr());
        rotated.extend(eigenvalues(&h).unwrap());
    }
    assert!(ks_distance(plain, rotated) < 0.1);
    let var = offdiag.iter().sum::<f64>() / offdiag.len() as f64;
    assert!(
        (var - 1.0).abs() < 0.5,
        "rotated off-diagonal variance {var}"
    );
}

#[test]
fn arrowhead_matches_dense_and_rs() {
    let n = 40;
    let lambda = realize_spectrum(&SpectrumSpec::multiscale(n, 1.0)).unwrap();
    let rs = RsSolver::<f64>::from_spectrum(lambda.clone());
    let mut both = 0;
    for t in 0..20 {
        let (g, e) = sample_arrowhead_noise(n, Seed::new(3, t)).unwrap();
        let sol = solve_arrowhead(&lambda, &g).unwrap();
        let m = HermitianMatrix::from_real_diagonal(lambda.values()).add(&arrowhead_matrix(&g));
        let (top, v) = top_eigenpair(&m).unwrap();
        assert_relative_eq!(sol.top_eigenvalue, top, max_relative = 1e-12);
        assert!(1.0 - dot(&v, &sol.eigenvector()).abs() < 1e-12);
        let r = rs.solve(&e, &SolveOptions::default()).unwrap();
        if !r.is_fallback() {
            both += 1;
            assert!(1.0 - dot(&r.u_tilde, &sol.eigenvector()).abs() < 1e-9);
        }
        lower_bound_check(&sol, &lambda, &g).unwrap();
    }
    assert!(both > 0);
}

#[test]
fn domination_at_zero_tau_is_min_eigenvalue() {
    let n = 12;
    let mu = MuVector::weyl_profile(n, 0.05).unwrap();
    for t in 0..10 {
        let x = sample_goe(n, Seed::new(4, t));
        let d = verify_shifted_domination(&x, &mu, 0.0, &[]).unwrap();
        let diff = HermitianMatrix::from_real_diagonal(&mu.mu).add(&x.scaled(-1.0));
        let lam_min = *eigenvalues(&diff).unwrap().last().unwrap();
        assert_relative_eq!(d.margin, lam_min, epsilon = 1e-10);
        assert_eq!(d.holds, lam_min >= 0.0);
    }
}

#[test]
fn domination_shifted_against_sampling() {
    // The sphere minimum can only be approached from above by samples.
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for k in 0..8 {
        let x = sample_goe(n, Seed::new(45, k));
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mu = MuVector::weyl_profile(n, 0.2 + 0.1 * k as f64).unwrap();
        let d = verify_shifted_domination(&x, &mu, 0.7, &g).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..50_000 {
            let mut z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let nz = norm2(&z);
            z.iter_mut().for_each(|v| *v /= nz);
            let xz = x.matrix().matvec(&z);
            let q: f64 = (0..n).map(|j| mu.mu[j] * z[j] * z[j] - z[j] * xz[j]).sum();
            let lin: f64 = g.iter().zip(&z).map(|(a, b)| a * b).sum();
            best = best.min(q - 0.7 * lin);
        }
        assert!(
            d.margin <= best + 1e-9,
            "margin {} above sampled {best}",
            d.margin
        );
        assert!(
            best - d.margin < 0.05 * (1.0 + d.margin.abs()),
            "margin {} vs sampled {best}",
            d.margin
        );
    }
}

#[test]
fn upper_bound_angle_matches_oracle() {
    let n = 64;
    let lambda = realize_spectrum(&SpectrumSpec::multiscale(n, 1.0)).unwrap();
    let rs = RsSolver::<f64>::from_spectrum(lambda.clone());
    for t in 0..10 {
        let e = sample_goe(n, Seed::new(6, t));
        let r = rs.solve(&e, &SolveOptions::default()).unwrap();
        if !r.leading_certified {
            continue;
        }
        let at = HermitianMatrix::from_real_diagonal(lambda.values()).add(&e);
        let (_, v) = top_eigenpair(&at).unwrap();
        let sin_solver = norm2(&r.u_tilde[1..]);
        let sin_oracle = (1.0 - v[0] * v[0]).max(0.0).sqrt();
        assert!((sin_solver - sin_oracle).abs() <= 1e-9);
        let dk = davis_kahan_bound(&lambda, spectral_norm(e.matrix()).unwrap());
        assert!(sin_oracle <= dk);
    }
}

#[test]
fn rs_bound_uses_gap_vector() {
    let lambda = realize_spectrum(&SpectrumSpec::linear(3, 1.0)).unwrap();
    let d = gap_vector(&lambda).unwrap();
    let want = 3f64.ln().sqrt() * (d.values()[0].powi(2) + d.values()[1].powi(2)).sqrt();
    assert_relative_eq!(
        rs_sin_theta_bound(&lambda, 1.0).unwrap(),
        want,
        max_relative = 1e-15
    );
}
