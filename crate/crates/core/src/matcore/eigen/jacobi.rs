//! Cyclic Jacobi rotations for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry with a diagonal
//! unitary, then applies the classical real plane rotation that annihilates
//! it.  Slow (O(n³) per sweep) but simple and independent of the
//! tridiagonal path, which makes it the reference used to cross-check it.

use crate::error::{PerturbError, Result};
use crate::matcore::matrix::{HermitianMatrix, Matrix};
use crate::matcore::scalar::Scalar;

use super::EigOptions;

/// Returns unsorted eigenvalues and the matrix of eigenvectors (columns).
pub(crate) fn cyclic_jacobi<T: Scalar>(
    m: &HermitianMatrix<T>,
    opts: &EigOptions,
) -> Result<(Vec<f64>, Matrix<T>)> {
    let n = m.n();
    let mut a = m.matrix().clone();
    let mut v = Matrix::<T>::identity(n);
    let fro = a.frobenius_norm();
    let target = opts.offdiag_tol * fro;

    let off_mass = |a: &Matrix<T>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].abs_sq();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut off = off_mass(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == opts.max_sweeps {
            return Err(PerturbError::NumericFailure {
                what: format!("Jacobi eigensolver: no convergence after {sweeps} sweeps"),
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gabs = g.abs();
                if gabs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re();
                let aqq = a[(q, q)].re();
                // Entry negligible next to both diagonal values: annihilate outright.
                if sweeps > 3
                    && app.abs() + 100.0 * gabs == app.abs()
                    && aqq.abs() + 100.0 * gabs == aqq.abs()
                {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                let u = g.phase();
                let zeta = (aqq - app) / (2.0 * gabs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ub = u.conj();

                // A ← A G with G = [[c, s], [−ū s, ū c]] on columns p, q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp.scale(c) - ub * akq.scale(s);
                    a[(k, q)] = akp.scale(s) + ub * akq.scale(c);
                }
                // A ← G* A on rows p, q.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk.scale(c) - u * aqk.scale(s);
                    a[(q, k)] = apk.scale(s) + u * aqk.scale(c);
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                a[(p, p)] = T::from_real(app - t * gabs);
                a[(q, q)] = T::from_real(aqq + t * gabs);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp.scale(c) - ub * vkq.scale(s);
                    v[(k, q)] = vkp.scale(s) + ub * vkq.scale(c);
                }
            }
        }
        off = off_mass(&a);
    }

    let values = (0..n).map(|i| a[(i, i)].re()).collect();
    Ok((values, v))
}
