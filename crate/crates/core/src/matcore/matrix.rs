use std::ops::{Index, IndexMut};

use super::scalar::Scalar;
use crate::error::{PerturbError, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PerturbError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[T]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `self^* v`.
    pub fn adjoint_matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "adjoint_matvec dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^* other`.
    pub fn adjoint_matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.rows, other.rows, "adjoint_matmul dimension mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let brow = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                let a = a.conj();
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a.scale(s)).collect(),
        }
    }

    /// Copy of the block `[r0, r1) x [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix<T> {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Exact self-adjointness: `m[j][k] == conj(m[k][j])` bit for bit.
    pub fn is_hermitian_exact(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        for i in 0..n {
            if self[(i, i)].im() != 0.0 {
                return false;
            }
            for j in 0..i {
                if self[(i, j)] != self[(j, i)].conj() {
                    return false;
                }
            }
        }
        true
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense self-adjoint matrix.  Symmetry is exact: the constructor rejects
/// anything that is not bit-for-bit Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T>(Matrix<T>);

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(PerturbError::InvalidMatrix(format!(
                "{}x{} matrix is not square",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_hermitian_exact() {
            return Err(PerturbError::InvalidMatrix(
                "matrix is not exactly self-adjoint".into(),
            ));
        }
        Ok(Self(m))
    }

    /// Builds the matrix from its upper triangle (`j <= k`) and mirrors the rest.
    /// Diagonal values keep only their real part.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = T::from_real(f(j, j).re());
            for k in (j + 1)..n {
                let v = f(j, k);
                m[(j, k)] = v;
                m[(k, j)] = v.conj();
            }
        }
        Self(m)
    }

    /// Mirrors the upper triangle of an arbitrary square matrix.
    pub fn from_upper(m: &Matrix<T>) -> Self {
        assert!(m.is_square());
        Self::from_upper_fn(m.rows(), |j, k| m[(j, k)])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<T> = diag.iter().map(|&x| T::from_real(x)).collect();
        Self(Matrix::from_diagonal(&d))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn add(&self, other: &HermitianMatrix<T>) -> HermitianMatrix<T> {
        Self(self.0.add(&other.0))
    }

    pub fn scaled(&self, s: f64) -> HermitianMatrix<T> {
        Self(self.0.scaled(s))
    }

    /// `v^* M v`, real for Hermitian `M`.
    pub fn quadratic_form(&self, v: &[T]) -> f64 {
        dot(v, &self.0.matvec(v)).re()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0[(i, i)].re()).collect()
    }
}

impl<T> Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &T {
        &self.0[idx]
    }
}

/// `<a, b> = a^* b`.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
}

pub fn normalized<T: Scalar>(v: &[T]) -> Vec<T> {
    let nrm = norm2(v);
    v.iter().map(|&x| x.scale(1.0 / nrm)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.5, 1.0]).unwrap();
        assert!(HermitianMatrix::new(m).is_err());
        let z = Matrix::from_row_major(1, 1, vec![Complex64::new(1.0, 1e-300)]).unwrap();
        assert!(HermitianMatrix::new(z).is_err());
    }

    #[test]
    fn mirror_construction_is_exact() {
        let h = HermitianMatrix::from_upper_fn(3, |j, k| {
            Complex64::new((j + k) as f64, j as f64 - k as f64)
        });
        assert!(h.matrix().is_hermitian_exact());
        assert_eq!(h[(0, 0)].im, 0.0);
        assert_eq!(h[(2, 0)], h[(0, 2)].conj());
    }

    #[test]
    fn adjoint_products_agree() {
        let a = Matrix::from_fn(3, 2, |i, j| Complex64::new(i as f64, j as f64 + 1.0));
        let b = Matrix::from_fn(3, 4, |i, j| Complex64::new(j as f64 - i as f64, 0.5));
        let direct = a.adjoint().matmul(&b);
        let fused = a.adjoint_matmul(&b);
        assert!(direct.sub(&fused).frobenius_norm() < 1e-14);
        let v = vec![Complex64::new(1.0, 2.0); 3];
        let mv = a.adjoint_matvec(&v);
        let mv2 = a.adjoint().matvec(&v);
        assert!(mv.iter().zip(&mv2).all(|(x, y)| (x - y).norm() < 1e-14));
    }
}
