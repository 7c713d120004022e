use crate::error::{PerturbError, Result};
use crate::matcore::{norm2, EigDecomposition, Scalar, Spectrum};

/// `ũ = (u + U_⊥q)/√(1 + ‖q‖²)`, so `⟨u, ũ⟩` is real and positive.
pub fn assemble_eigvec<T: Scalar>(eig: &EigDecomposition<T>, q: &[T]) -> Result<Vec<T>> {
    let n = eig.n();
    if q.len() + 1 != n {
        return Err(PerturbError::DimensionMismatch {
            expected: n - 1,
            found: q.len(),
        });
    }
    let c = 1.0 / (1.0 + norm2(q).powi(2)).sqrt();
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(T::from_real(c));
    coeffs.extend(q.iter().map(|&x| x.scale(c)));
    Ok(eig.basis.matvec(&coeffs))
}

/// `λ̃ = λ₁ + E₁₁ + E₁₂q`; the imaginary part of `E₁₂q` must vanish.
pub fn eigenvalue_from_q<T: Scalar>(lambda1: f64, e11: f64, e12: &[T], q: &[T]) -> Result<f64> {
    let s = e12
        .iter()
        .zip(q)
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    if s.im().abs() > 1e-10 * (1.0 + s.re().abs()) {
        return Err(PerturbError::Inconsistency(s.im()));
    }
    Ok(lambda1 + e11 + s.re())
}

/// `(λ₁ − λ_{j+1})·|⟨ũ, u_{j+1}⟩|/√(ln n)` with `⟨ũ, u_{j+1}⟩ = q_j/√(1 + ‖q‖²)`.
pub fn coordinate_bounds<T: Scalar>(q: &[T], lambda: &Spectrum) -> Vec<f64> {
    let c = 1.0 / (1.0 + norm2(q).powi(2)).sqrt();
    overlap_ratios(q.iter().map(|x| x.abs() * c), lambda)
}

/// Same statistic from coordinate overlaps `|⟨ũ, u_{j+1}⟩|` given directly.
pub fn overlap_ratios(overlaps: impl Iterator<Item = f64>, lambda: &Spectrum) -> Vec<f64> {
    let top = lambda.top();
    let s = lambda.log_n().sqrt();
    overlaps
        .zip(&lambda.values()[1..])
        .map(|(o, &l)| (top - l) * o / s)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_goe, Seed};
    use crate::matcore::{dot, hermitian_eig};
    use approx::assert_relative_eq;

    fn sp(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_q_is_u1() {
        let eig = hermitian_eig(&sample_goe(4, Seed::new(0, 0))).unwrap();
        let u = assemble_eigvec(&eig, &[0.0; 3]).unwrap();
        assert_eq!(u, eig.vector(0));
    }

    #[test]
    fn two_dim() {
        let eig = EigDecomposition::<f64>::from_spectrum(&sp(&[2.0, 1.0]));
        let u = assemble_eigvec(&eig, &[1.0]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(u[0], r, epsilon = 1e-16);
        assert_relative_eq!(u[1], r, epsilon = 1e-16);
    }

    #[test]
    fn projections_match_q() {
        let eig = hermitian_eig(&sample_goe(8, Seed::new(0, 1))).unwrap();
        let q: Vec<f64> = (0..7).map(|j| 0.1 * j as f64 - 0.3).collect();
        let u = assemble_eigvec(&eig, &q).unwrap();
        assert_relative_eq!(norm2(&u), 1.0, epsilon = 1e-14);
        let c = 1.0 / (1.0 + norm2(&q).powi(2)).sqrt();
        assert_relative_eq!(dot(&eig.vector(0), &u), c, epsilon = 1e-14);
        for (j, qj) in q.iter().enumerate() {
            assert_relative_eq!(dot(&eig.vector(j + 1), &u), qj * c, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(
            eigenvalue_from_q(3.0, 0.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap(),
            3.0
        );
        let bad = [num_complex::Complex64::new(0.0, 1.0)];
        let q = [num_complex::Complex64::new(1.0, 0.0)];
        assert!(matches!(
            eigenvalue_from_q(1.0, 0.0, &bad, &q),
            Err(PerturbError::Inconsistency(_))
        ));
    }

    #[test]
    fn coordinate_example() {
        let l = sp(&[3.0, 2.0, 1.0]);
        let q = [0.1, 0.01];
        let c = 1.0 / (1.0f64 + 0.01 + 0.0001).sqrt();
        let s = 3f64.ln().sqrt();
        let r = coordinate_bounds(&q, &l);
        assert_relative_eq!(r[0], 1.0 * 0.1 * c / s, max_relative = 1e-15);
        assert_relative_eq!(r[1], 2.0 * 0.01 * c / s, max_relative = 1e-15);
        assert_eq!(coordinate_bounds(&[0.0, 0.0], &l), vec![0.0, 0.0]);
    }
}
