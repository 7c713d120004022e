//! Householder reduction to real symmetric tridiagonal form followed by the
//! implicit QL algorithm.
//!
//! A Hermitian `A` is reduced to `A = Q T Q*` with `Q` a product of
//! Householder reflectors and `T` Hermitian tridiagonal.  A diagonal unitary
//! `Φ` then rotates the (complex) off-diagonal entries onto the nonnegative
//! reals, so `A = (QΦ) T' (QΦ)*` with `T'` real symmetric.  Eigenvectors of
//! `A` are `QΦz` for eigenvectors `z` of `T'`.

use crate::error::{PerturbError, Result};
use crate::matcore::matrix::{HermitianMatrix, Matrix};
use crate::matcore::scalar::Scalar;

struct Reflector<T> {
    start: usize,
    w: Vec<T>,
    beta: f64,
}

pub(crate) struct Tridiagonal<T> {
    n: usize,
    pub(crate) diag: Vec<f64>,
    /// Subdiagonal of `T'`, length `n − 1`, nonnegative.
    pub(crate) off: Vec<f64>,
    phases: Vec<T>,
    reflectors: Vec<Reflector<T>>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub(crate) fn reduce(m: &HermitianMatrix<T>) -> Self {
        let n = m.n();
        let mut a = m.matrix().clone();
        let mut reflectors = Vec::new();

        for k in 0..n.saturating_sub(2) {
            let start = k + 1;
            let len = n - start;
            let x: Vec<T> = (start..n).map(|i| a[(i, k)]).collect();
            let tail_sq: f64 = x[1..].iter().map(|v| v.abs_sq()).sum();
            if tail_sq == 0.0 {
                continue;
            }
            let alpha = x[0];
            let xnorm = (alpha.abs_sq() + tail_sq).sqrt();
            let ph = alpha.phase();
            let mut w = x;
            w[0] += ph.scale(xnorm);
            let beta = 1.0 / (xnorm * xnorm + alpha.abs() * xnorm);

            // Column k below the diagonal becomes (-ph·|x|, 0, …, 0).
            let head = -ph.scale(xnorm);
            a[(start, k)] = head;
            a[(k, start)] = head.conj();
            for i in (start + 1)..n {
                a[(i, k)] = T::zero();
                a[(k, i)] = T::zero();
            }

            // p = beta·B w on the trailing block B = a[start.., start..].
            let mut p = vec![T::zero(); len];
            for (i, pi) in p.iter_mut().enumerate() {
                let row = &a.row(start + i)[start..];
                let s = row
                    .iter()
                    .zip(&w)
                    .fold(T::zero(), |acc, (&b, &wj)| acc + b * wj);
                *pi = s.scale(beta);
            }
            let wp: T = w
                .iter()
                .zip(&p)
                .fold(T::zero(), |acc, (&wi, &pi)| acc + wi.conj() * pi);
            let kcoef = 0.5 * beta * wp.re();
            let q: Vec<T> = p
                .iter()
                .zip(&w)
                .map(|(&pi, &wi)| pi - wi.scale(kcoef))
                .collect();

            // B ← B − w q* − q w*.
            for i in 0..len {
                let (wi, qi) = (w[i], q[i]);
                let row = &mut a.row_mut(start + i)[start..];
                for ((b, &wj), &qj) in row.iter_mut().zip(&w).zip(&q) {
                    *b -= wi * qj.conj() + qi * wj.conj();
                }
            }
            // Restore exact self-adjointness of the diagonal.
            for i in start..n {
                a[(i, i)] = T::from_real(a[(i, i)].re());
            }

            reflectors.push(Reflector { start, w, beta });
        }

        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re()).collect();
        let mut phases = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        if n > 0 {
            phases.push(T::one());
        }
        for k in 0..n.saturating_sub(1) {
            let e = a[(k + 1, k)];
            off.push(e.abs());
            let next = phases[k] * e.phase();
            phases.push(next);
        }

        Self {
            n,
            diag,
            off,
            phases,
            reflectors,
        }
    }

    /// Maps an eigenvector `z` of `T'` to the eigenvector `QΦz` of `A`.
    pub(crate) fn back_transform(&self, z: &[f64]) -> Vec<T> {
        let mut y: Vec<T> = z
            .iter()
            .zip(&self.phases)
            .map(|(&zi, &ph)| ph.scale(zi))
            .collect();
        for r in self.reflectors.iter().rev() {
            let seg = &mut y[r.start..];
            let s =
                r.w.iter()
                    .zip(seg.iter())
                    .fold(T::zero(), |acc, (&wi, &yi)| acc + wi.conj() * yi)
                    .scale(r.beta);
            for (yi, &wi) in seg.iter_mut().zip(&r.w) {
                *yi -= wi * s;
            }
        }
        y
    }

    /// Back-transforms every row of `zt` (row `i` holds eigenvector `i` of `T'`)
    /// and returns the basis with eigenvectors as columns.
    pub(crate) fn back_transform_all(&self, zt: &[Vec<f64>]) -> Matrix<T> {
        let n = self.n;
        // y is stored row-major with rows = components, columns = eigenvectors.
        let mut y = Matrix::<T>::zeros(n, n);
        for (col, z) in zt.iter().enumerate() {
            for i in 0..n {
                y[(i, col)] = self.phases[i].scale(z[i]);
            }
        }
        let mut s = vec![T::zero(); n];
        for r in self.reflectors.iter().rev() {
            s.iter_mut().for_each(|v| *v = T::zero());
            for (i, &wi) in r.w.iter().enumerate() {
                let wc = wi.conj();
                for (sj, &yij) in s.iter_mut().zip(y.row(r.start + i)) {
                    *sj += wc * yij;
                }
            }
            for sj in s.iter_mut() {
                *sj = sj.scale(r.beta);
            }
            for (i, &wi) in r.w.iter().enumerate() {
                for (yij, &sj) in y.row_mut(r.start + i).iter_mut().zip(&s) {
                    *yij -= wi * sj;
                }
            }
        }
        y
    }
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal
/// matrix.  `diag` is overwritten with the (unsorted) eigenvalues.  When `zt`
/// is given, row `i` of `zt` accumulates eigenvector `i`.
pub(crate) fn tridiagonal_ql(
    diag: &mut [f64],
    off: &[f64],
    mut zt: Option<&mut [Vec<f64>]>,
    max_iter: usize,
) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    let d = diag;
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(PerturbError::NumericFailure {
                    what: format!("tridiagonal QL did not converge for eigenvalue {l}"),
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let zi = &mut lo[i];
                    let zi1 = &mut hi[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvector of the real symmetric tridiagonal matrix for the eigenvalue
/// `lambda`, assumed to be the largest one.  Inverse iteration with the shift
/// nudged just above `lambda`, so `σI − T` stays positive definite and the
/// unpivoted tridiagonal solve is stable.
pub(crate) fn top_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let tnorm = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1] } else { 0.0 }
                + if i + 1 < n { off[i] } else { 0.0 }
        })
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * tnorm;
    let sigma = lambda + 4.0 * tiny;

    // LDLᵀ factorisation of σI − T.
    let mut piv = vec![0.0; n];
    let mut mult = vec![0.0; n];
    piv[0] = sigma - diag[0];
    if piv[0].abs() < tiny {
        piv[0] = tiny;
    }
    for i in 1..n {
        // sub/super diagonal of σI − T is −off.
        mult[i] = -off[i - 1] / piv[i - 1];
        piv[i] = sigma - diag[i] + mult[i] * off[i - 1];
        if piv[i].abs() < tiny {
            piv[i] = tiny;
        }
    }

    let mut x = vec![1.0; n];
    for _ in 0..3 {
        // forward: L y = x
        for i in 1..n {
            x[i] -= mult[i] * x[i - 1];
        }
        // diagonal + backward: D Lᵀ v = y
        x[n - 1] /= piv[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = x[i] / piv[i] - mult[i + 1] * x[i + 1];
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            break;
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn tridiagonal_form_reconstructs() {
        let h = HermitianMatrix::from_upper_fn(5, |j, k| {
            Complex64::new(
                (j * 3 + k) as f64 * 0.37 - 1.0,
                (k as f64 - j as f64) * 0.21,
            )
        });
        let tri = Tridiagonal::reduce(&h);
        let n = 5;
        // Build T' explicitly, back-transform columns of identity, compare QΦ T' (QΦ)*.
        let mut t = Matrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = Complex64::new(tri.diag[i], 0.0);
            if i + 1 < n {
                t[(i + 1, i)] = Complex64::new(tri.off[i], 0.0);
                t[(i, i + 1)] = Complex64::new(tri.off[i], 0.0);
            }
        }
        let ident: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let qp = tri.back_transform_all(&ident);
        let rec = qp.matmul(&t).matmul(&qp.adjoint());
        assert!(rec.sub(h.matrix()).frobenius_norm() < 1e-12);
    }
}
