use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::dist::EntryDistribution;
use super::seed::Seed;
use super::spec::{realize_spectrum, SpectrumSpec};
use crate::error::{PerturbError, Result};
use crate::matcore::io::AnyHermitian;
use crate::matcore::{HermitianMatrix, Matrix, ScalarKind};

pub const GOE_CONVENTION: &str = "off-diagonal N(0,1), diagonal N(0,2)";
pub const GUE_CONVENTION: &str =
    "off-diagonal re, im each N(0,1/2) (total variance 1), diagonal N(0,1)";

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(PerturbError::Domain(format!("need n >= {min}, got {n}")));
    }
    Ok(())
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Real symmetric matrix with i.i.d. entries on and above the diagonal.
/// Entries are drawn row by row over the upper triangle.
pub fn subgaussian_real<R: Rng + ?Sized>(
    n: usize,
    dist: &EntryDistribution,
    rng: &mut R,
) -> HermitianMatrix<f64> {
    HermitianMatrix::from_upper_fn(n, |_, _| dist.sample(rng))
}

/// Complex Hermitian analogue: off-diagonal real and imaginary parts are
/// independent draws scaled by `1/√2` (so `E|z|² = 1`), diagonal real.
pub fn subgaussian_complex<R: Rng + ?Sized>(
    n: usize,
    dist: &EntryDistribution,
    rng: &mut R,
) -> HermitianMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    HermitianMatrix::from_upper_fn(n, |j, k| {
        if j == k {
            Complex64::new(dist.sample(rng), 0.0)
        } else {
            let re = dist.sample(rng) * h;
            let im = dist.sample(rng) * h;
            Complex64::new(re, im)
        }
    })
}

pub fn sample_subgaussian_hermitian(
    n: usize,
    dist: &EntryDistribution,
    scalar: ScalarKind,
    seed: Seed,
) -> Result<AnyHermitian> {
    require_n(n, 2)?;
    dist.validate()?;
    let mut rng = seed.rng();
    Ok(match scalar {
        ScalarKind::Real => AnyHermitian::Real(subgaussian_real(n, dist, &mut rng)),
        ScalarKind::Complex => AnyHermitian::Complex(subgaussian_complex(n, dist, &mut rng)),
    })
}

pub fn goe_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix<f64> {
    let s2 = std::f64::consts::SQRT_2;
    HermitianMatrix::from_upper_fn(n, |j, k| {
        let x = normal(rng);
        if j == k {
            s2 * x
        } else {
            x
        }
    })
}

pub fn gue_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    HermitianMatrix::from_upper_fn(n, |j, k| {
        if j == k {
            Complex64::new(normal(rng), 0.0)
        } else {
            let re = normal(rng) * h;
            let im = normal(rng) * h;
            Complex64::new(re, im)
        }
    })
}

pub fn sample_goe(n: usize, seed: Seed) -> HermitianMatrix<f64> {
    goe_from(n, &mut seed.rng())
}

pub fn sample_gue(n: usize, seed: Seed) -> HermitianMatrix<Complex64> {
    gue_from(n, &mut seed.rng())
}

/// Standard normal vector of length `n − 1`.
pub fn arrowhead_g_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n.saturating_sub(1)).map(|_| normal(rng)).collect()
}

pub fn sample_arrowhead_g(n: usize, seed: Seed) -> Result<Vec<f64>> {
    require_n(n, 2)?;
    Ok(arrowhead_g_from(n, &mut seed.rng()))
}

/// `[[0, gᵀ], [g, 0]]`.
pub fn arrowhead_matrix(g: &[f64]) -> HermitianMatrix<f64> {
    HermitianMatrix::from_upper_fn(
        g.len() + 1,
        |j, k| if j == 0 && k > 0 { g[k - 1] } else { 0.0 },
    )
}

pub fn sample_arrowhead_noise(n: usize, seed: Seed) -> Result<(Vec<f64>, HermitianMatrix<f64>)> {
    let g = sample_arrowhead_g(n, seed)?;
    let e = arrowhead_matrix(&g);
    Ok((g, e))
}

/// `E = [[0, 0], [0, G]]` with `G` a GOE of size `n − 1`.
pub fn embedded_goe_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix<f64> {
    let g = goe_from(n - 1, rng);
    let mut m = Matrix::<f64>::zeros(n, n);
    for j in 1..n {
        for k in 1..n {
            m[(j, k)] = g[(j - 1, k - 1)];
        }
    }
    HermitianMatrix::from_upper(&m)
}

/// `A = diag(λ)` for the inconsistency spectrum and `E` with a GOE block
/// below its zero first row and column.
pub fn sample_inconsistency_instance(
    n: usize,
    p: f64,
    seed: Seed,
) -> Result<(HermitianMatrix<f64>, HermitianMatrix<f64>)> {
    require_n(n, 3)?;
    let spectrum = realize_spectrum(&SpectrumSpec::inconsistency(n, p))?;
    let a = HermitianMatrix::from_real_diagonal(spectrum.values());
    let e = embedded_goe_from(n, &mut seed.rng());
    Ok((a, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_support_and_symmetry() {
        let m = sample_subgaussian_hermitian(
            2,
            &EntryDistribution::Rademacher,
            ScalarKind::Real,
            Seed::new(5, 0),
        )
        .unwrap();
        let AnyHermitian::Real(h) = m else { panic!() };
        assert!(h.matrix().as_slice().iter().all(|x| x.abs() == 1.0));
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn same_seed_same_matrix() {
        let s = Seed::new(9, 4);
        assert_eq!(sample_goe(20, s), sample_goe(20, s));
        assert_eq!(sample_gue(20, s), sample_gue(20, s));
        assert_ne!(sample_goe(20, s), sample_goe(20, Seed::new(9, 5)));
    }

    #[test]
    fn complex_is_exactly_hermitian() {
        let h = sample_gue(12, Seed::new(1, 2));
        assert!(h.matrix().is_hermitian_exact());
        let s = sample_subgaussian_hermitian(
            6,
            &EntryDistribution::UniformPm1,
            ScalarKind::Complex,
            Seed::new(1, 3),
        )
        .unwrap();
        assert_eq!(s.kind(), ScalarKind::Complex);
    }

    #[test]
    fn arrowhead_structure() {
        let (g, e) = sample_arrowhead_noise(2, Seed::new(2, 2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(e.matrix().as_slice(), &[0.0, g[0], g[0], 0.0]);
        let (g, e) = sample_arrowhead_noise(6, Seed::new(2, 3)).unwrap();
        for j in 1..6 {
            assert_eq!(e[(0, j)], g[j - 1]);
            for k in 1..6 {
                assert_eq!(e[(j, k)], 0.0);
            }
        }
    }

    #[test]
    fn inconsistency_structure() {
        let n = 50;
        let (a, e) = sample_inconsistency_instance(n, 2.0, Seed::new(4, 4)).unwrap();
        assert_eq!(a[(n - 1, n - 1)], 3.0 * (n as f64).sqrt());
        assert!((0..n).all(|j| e[(0, j)] == 0.0 && e[(j, 0)] == 0.0));
        assert!(e[(1, 1)] != 0.0);
    }

    #[test]
    fn small_n_rejected() {
        assert!(sample_arrowhead_g(1, Seed::new(0, 0)).is_err());
        assert!(sample_inconsistency_instance(2, 2.0, Seed::new(0, 0)).is_err());
    }
}
