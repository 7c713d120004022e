use serde::{Deserialize, Serialize};

use crate::bounds::MuVector;
use crate::error::{PerturbError, Result};
use crate::matcore::{eigenvalues, hermitian_eig, HermitianMatrix, Matrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    pub holds: bool,
    /// `min_{‖z‖=1} z*(D_μ − X)z − τ·Re(g*z)`.
    pub margin: f64,
}

/// Checks `z*Xz + τ‖z‖₂·Re(g*z) ≤ z*D_μz` for all `z`, which by homogeneity
/// is the sign of the sphere minimum of `z*(D_μ − X)z − τ·Re(g*z)`.
/// At `τ = 0` that minimum is `λ_min(D_μ − X)`; otherwise it is a
/// trust-region subproblem solved in the eigenbasis of `D_μ − X`.
pub fn verify_shifted_domination<T: Scalar>(
    x: &HermitianMatrix<T>,
    mu: &MuVector,
    tau: f64,
    g: &[T],
) -> Result<Domination> {
    let n = x.n();
    if mu.n() != n {
        return Err(PerturbError::DimensionMismatch {
            expected: n,
            found: mu.n(),
        });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(PerturbError::Domain(format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    let dmu: Vec<T> = mu.mu.iter().map(|&m| T::from_real(m)).collect();
    let b = HermitianMatrix::new(Matrix::from_diagonal(&dmu))?.add(&x.scaled(-1.0));

    let margin = if tau == 0.0 || g.iter().all(|v| v.abs() == 0.0) {
        *eigenvalues(&b)?.last().expect("n >= 1")
    } else {
        if g.len() != n {
            return Err(PerturbError::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        let eig = hermitian_eig(&b)?;
        let c = eig.basis.adjoint_matvec(g);
        let a: Vec<f64> = c.iter().map(|ci| 0.25 * tau * tau * ci.abs_sq()).collect();
        sphere_minimum(&eig.values, &a)?
    };
    Ok(Domination {
        holds: margin >= 0.0,
        margin,
    })
}

/// `min_{‖w‖=1} Σ β_i|w_i|² − 2 Σ √a_i |w_i|` (phases already optimal).
/// With the multiplier `σ < β_min` and `Σ a_i/(β_i − σ)² = 1`,
/// the minimum is `σ − Σ a_i/(β_i − σ)`.
fn sphere_minimum(beta: &[f64], a: &[f64]) -> Result<f64> {
    let bmin = beta.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = beta.iter().map(|b| b.abs()).fold(0.0, f64::max).max(1.0);
    let tiny = 64.0 * f64::EPSILON * scale;
    let gaps: Vec<f64> = beta.iter().map(|b| b - bmin).collect();
    let phi = |t: f64| -> f64 {
        a.iter()
            .zip(&gaps)
            .map(|(&ai, &gi)| ai / (gi + t).powi(2))
            .sum()
    };
    let value = |t: f64| -> f64 {
        bmin - t
            - a.iter()
                .zip(&gaps)
                .map(|(&ai, &gi)| ai / (gi + t))
                .sum::<f64>()
    };

    // Hard case: no weight on the bottom eigenspace and the rest cannot fill the sphere.
    let bottom_weight: f64 = a
        .iter()
        .zip(&gaps)
        .filter(|(_, &g)| g <= tiny)
        .map(|(&ai, _)| ai)
        .sum();
    if bottom_weight == 0.0 {
        let rest: f64 = a
            .iter()
            .zip(&gaps)
            .filter(|(_, &g)| g > tiny)
            .map(|(&ai, &gi)| ai / (gi * gi))
            .sum();
        if rest <= 1.0 {
            let v: f64 = a
                .iter()
                .zip(&gaps)
                .filter(|(_, &g)| g > tiny)
                .map(|(&ai, &gi)| ai / gi)
                .sum();
            return Ok(bmin - v);
        }
    }

    // ψ(t) = 1/√φ(t) − 1 increases from −1 to ≥ 0 on (0, √Σa]; nearly linear.
    let total: f64 = a.iter().sum();
    let mut lo = 0.0;
    let mut hi = total.sqrt().max(f64::MIN_POSITIVE);
    let psi = |t: f64| -> (f64, f64) {
        let f = phi(t);
        let df: f64 = -2.0
            * a.iter()
                .zip(&gaps)
                .map(|(&ai, &gi)| ai / (gi + t).powi(3))
                .sum::<f64>();
        (1.0 / f.sqrt() - 1.0, -0.5 * f.powf(-1.5) * df)
    };
    let mut t = 0.5 * hi;
    for _ in 0..200 {
        let (v, dv) = psi(t);
        if v.abs() <= 1e-15 {
            return Ok(value(t));
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - v / dv;
        t = if dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi.max(tiny) {
            return Ok(value(t));
        }
    }
    Err(PerturbError::NumericFailure {
        what: "trust-region secular equation did not converge".into(),
        residual: psi(t).0.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_x_margin_is_min_mu() {
        let mu = MuVector::new(vec![3.0, 1.5, 2.0]).unwrap();
        let r =
            verify_shifted_domination(&HermitianMatrix::<f64>::zeros(3), &mu, 0.0, &[]).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.margin, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn one_dimensional() {
        for (m, xv, g) in [(3.0, 1.0, 1.5), (3.0, 1.0, 2.5), (1.0, 0.0, -0.5)] {
            let x = HermitianMatrix::from_real_diagonal(&[xv]);
            let mu = MuVector::new(vec![m]).unwrap();
            let r = verify_shifted_domination(&x, &mu, 1.0, &[g]).unwrap();
            let want: f64 = m - xv - f64::abs(g);
            assert_relative_eq!(r.margin, want, epsilon = 1e-12);
            assert_eq!(r.holds, want >= 0.0);
        }
    }

    #[test]
    fn hard_case() {
        // g orthogonal to the bottom eigenvector, small enough not to fill the sphere.
        let x = HermitianMatrix::from_real_diagonal(&[0.0, 0.0]);
        let mu = MuVector::new(vec![1.0, 3.0]).unwrap();
        let r = verify_shifted_domination(&x, &mu, 1.0, &[0.0, 1.0]).unwrap();
        // a = 1/4 on the β = 3 direction: min = 1 − (1/4)/2.
        assert_relative_eq!(r.margin, 1.0 - 0.125, epsilon = 1e-14);
    }

    #[test]
    fn agrees_with_direct_minimisation_2d() {
        let x =
            HermitianMatrix::new(Matrix::from_row_major(2, 2, vec![0.5, 0.3, 0.3, -0.2]).unwrap())
                .unwrap();
        let mu = MuVector::new(vec![1.0, 1.2]).unwrap();
        let g = [0.8, -0.4];
        let tau = 0.7;
        let r = verify_shifted_domination(&x, &mu, tau, &g).unwrap();
        let mut best = f64::INFINITY;
        for k in 0..200_000 {
            let th = k as f64 / 200_000.0 * std::f64::consts::TAU;
            let z = [th.cos(), th.sin()];
            let q = (mu.mu[0] - 0.5) * z[0] * z[0] + (mu.mu[1] + 0.2) * z[1] * z[1]
                - 2.0 * 0.3 * z[0] * z[1];
            best = best.min(q - tau * (g[0] * z[0] + g[1] * z[1]));
        }
        assert_relative_eq!(r.margin, best, epsilon = 1e-9);
    }
}
