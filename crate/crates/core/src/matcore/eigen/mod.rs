//! Dense Hermitian eigensolvers: the trusted oracle every other module is
//! validated against.
//!
//! Two interchangeable algorithms sit behind [`EigenSolver`] and are
//! registered by name:
//!
//! * `householder-ql`: Householder tridiagonalisation + implicit QL (default).
//! * `jacobi`: cyclic Jacobi rotations.
//!
//! Output is deterministic: eigenvalues are sorted descending with ties kept
//! in the order the algorithm produced them, and every eigenvector is
//! rotated so its largest-magnitude entry is real and positive.

mod jacobi;
mod tridiagonal;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::matrix::{HermitianMatrix, Matrix};
use super::scalar::Scalar;
use super::spectrum::Spectrum;
use crate::error::{PerturbError, Result};

pub const DEFAULT_SOLVER: &str = "householder-ql";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    /// Jacobi stops once the off-diagonal Frobenius mass drops below
    /// `offdiag_tol · ‖M‖_F`.
    pub offdiag_tol: f64,
    pub max_sweeps: usize,
    /// QL iterations allowed per eigenvalue.
    pub ql_max_iter: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            offdiag_tol: 1e-14,
            max_sweeps: 50,
            ql_max_iter: 60,
        }
    }
}

/// Eigenvalues in descending order with the matching orthonormal basis
/// (eigenvector `j` is column `j`).
///
/// The values are not forced into a [`Spectrum`] because decompositions of
/// arbitrary matrices may have a repeated top eigenvalue; call
/// [`EigDecomposition::spectrum`] when a simple top is required.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition<T> {
    pub values: Vec<f64>,
    pub basis: Matrix<T>,
}

impl<T: Scalar> EigDecomposition<T> {
    /// Decomposition of `diag(λ)` with `U = I`.
    pub fn from_spectrum(spectrum: &Spectrum) -> Self {
        let n = spectrum.n();
        Self {
            values: spectrum.values().to_vec(),
            basis: Matrix::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::new(self.values.clone())
    }

    pub fn vector(&self, j: usize) -> Vec<T> {
        self.basis.column(j)
    }

    /// `U Λ U*`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.n();
        let mut scaled = self.basis.clone();
        for i in 0..n {
            for (j, &l) in self.values.iter().enumerate() {
                scaled[(i, j)] = scaled[(i, j)].scale(l);
            }
        }
        scaled.matmul(&self.basis.adjoint())
    }
}

/// A dense Hermitian eigensolver.
pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn decompose_real(
        &self,
        m: &HermitianMatrix<f64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<f64>>;

    fn decompose_complex(
        &self,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<Complex64>>;

    fn eigenvalues_real(&self, m: &HermitianMatrix<f64>, opts: &EigOptions) -> Result<Vec<f64>> {
        Ok(self.decompose_real(m, opts)?.values)
    }

    fn eigenvalues_complex(
        &self,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<Vec<f64>> {
        Ok(self.decompose_complex(m, opts)?.values)
    }
}

/// Routes a generic call to the scalar-specific method of a solver.
pub trait EigScalar: Scalar {
    fn decompose_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<Self>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<Self>>;

    fn eigenvalues_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<Self>,
        opts: &EigOptions,
    ) -> Result<Vec<f64>>;
}

impl EigScalar for f64 {
    fn decompose_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<f64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<f64>> {
        solver.decompose_real(m, opts)
    }

    fn eigenvalues_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<f64>,
        opts: &EigOptions,
    ) -> Result<Vec<f64>> {
        solver.eigenvalues_real(m, opts)
    }
}

impl EigScalar for Complex64 {
    fn decompose_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<Complex64>> {
        solver.decompose_complex(m, opts)
    }

    fn eigenvalues_with(
        solver: &dyn EigenSolver,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<Vec<f64>> {
        solver.eigenvalues_complex(m, opts)
    }
}

pub struct JacobiSolver;

impl JacobiSolver {
    fn run<T: Scalar>(m: &HermitianMatrix<T>, opts: &EigOptions) -> Result<EigDecomposition<T>> {
        let (values, basis) = jacobi::cyclic_jacobi(m, opts)?;
        Ok(finalize(values, basis))
    }
}

impl EigenSolver for JacobiSolver {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn decompose_real(
        &self,
        m: &HermitianMatrix<f64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<f64>> {
        Self::run(m, opts)
    }

    fn decompose_complex(
        &self,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<Complex64>> {
        Self::run(m, opts)
    }
}

pub struct HouseholderQl;

impl HouseholderQl {
    fn run<T: Scalar>(m: &HermitianMatrix<T>, opts: &EigOptions) -> Result<EigDecomposition<T>> {
        let n = m.n();
        let tri = tridiagonal::Tridiagonal::reduce(m);
        let mut values = tri.diag.clone();
        let mut zt: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r
            })
            .collect();
        tridiagonal::tridiagonal_ql(&mut values, &tri.off, Some(&mut zt), opts.ql_max_iter)?;
        let basis = tri.back_transform_all(&zt);
        Ok(finalize(values, basis))
    }

    fn values<T: Scalar>(m: &HermitianMatrix<T>, opts: &EigOptions) -> Result<Vec<f64>> {
        let tri = tridiagonal::Tridiagonal::reduce(m);
        let mut values = tri.diag.clone();
        tridiagonal::tridiagonal_ql(&mut values, &tri.off, None, opts.ql_max_iter)?;
        sort_descending(&mut values);
        Ok(values)
    }
}

impl EigenSolver for HouseholderQl {
    fn name(&self) -> &'static str {
        DEFAULT_SOLVER
    }

    fn decompose_real(
        &self,
        m: &HermitianMatrix<f64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<f64>> {
        Self::run(m, opts)
    }

    fn decompose_complex(
        &self,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<EigDecomposition<Complex64>> {
        Self::run(m, opts)
    }

    fn eigenvalues_real(&self, m: &HermitianMatrix<f64>, opts: &EigOptions) -> Result<Vec<f64>> {
        Self::values(m, opts)
    }

    fn eigenvalues_complex(
        &self,
        m: &HermitianMatrix<Complex64>,
        opts: &EigOptions,
    ) -> Result<Vec<f64>> {
        Self::values(m, opts)
    }
}

/// Name → solver lookup.
pub struct EigenRegistry {
    solvers: BTreeMap<&'static str, Box<dyn EigenSolver>>,
}

impl EigenRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, solver: Box<dyn EigenSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn EigenSolver> {
        self.solvers.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            PerturbError::Config(format!(
                "unknown eigensolver `{name}` (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }
}

impl Default for EigenRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(HouseholderQl));
        r.register(Box::new(JacobiSolver));
        r
    }
}

/// Process-wide registry with the built-in solvers.
pub fn registry() -> &'static EigenRegistry {
    static REGISTRY: OnceLock<EigenRegistry> = OnceLock::new();
    REGISTRY.get_or_init(EigenRegistry::default)
}

pub fn solver(name: &str) -> Result<&'static dyn EigenSolver> {
    registry().get(name)
}

/// Full eigendecomposition with the default solver.
pub fn hermitian_eig<T: Scalar>(m: &HermitianMatrix<T>) -> Result<EigDecomposition<T>> {
    HouseholderQl::run(m, &EigOptions::default())
}

pub fn hermitian_eig_with<T: EigScalar>(
    solver: &dyn EigenSolver,
    m: &HermitianMatrix<T>,
    opts: &EigOptions,
) -> Result<EigDecomposition<T>> {
    T::decompose_with(solver, m, opts)
}

/// Eigenvalues only, descending.
pub fn eigenvalues<T: Scalar>(m: &HermitianMatrix<T>) -> Result<Vec<f64>> {
    HouseholderQl::values(m, &EigOptions::default())
}

/// Largest eigenvalue and a unit eigenvector for it, phase-normalised.
/// Costs one tridiagonal reduction plus O(n²).
pub fn top_eigenpair<T: Scalar>(m: &HermitianMatrix<T>) -> Result<(f64, Vec<T>)> {
    let n = m.n();
    if n == 0 {
        return Err(PerturbError::InvalidMatrix("empty matrix".into()));
    }
    let opts = EigOptions::default();
    let tri = tridiagonal::Tridiagonal::reduce(m);
    let mut values = tri.diag.clone();
    tridiagonal::tridiagonal_ql(&mut values, &tri.off, None, opts.ql_max_iter)?;
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z = tridiagonal::top_eigenvector(&tri.diag, &tri.off, top);
    let mut v = tri.back_transform(&z);
    normalize_phase(&mut v);
    Ok((top, v))
}

fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

/// Rotates `v` so its first largest-magnitude entry is real positive, and
/// rescales it to unit length.
pub fn normalize_phase<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let rot = v[best].phase().conj();
    let nrm = v.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x = (*x * rot).scale(1.0 / nrm);
    }
    v[best] = T::from_real(v[best].re());
}

fn finalize<T: Scalar>(values: Vec<f64>, basis: Matrix<T>) -> EigDecomposition<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep algorithm order
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = Matrix::<T>::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        sorted.push(values[old_j]);
        let mut col = basis.column(old_j);
        normalize_phase(&mut col);
        out.set_column(new_j, &col);
    }
    EigDecomposition {
        values: sorted,
        basis: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn both() -> Vec<&'static dyn EigenSolver> {
        vec![solver("jacobi").unwrap(), solver(DEFAULT_SOLVER).unwrap()]
    }

    #[test]
    fn diagonal_input() {
        let m = HermitianMatrix::<f64>::from_real_diagonal(&[3.0, 1.0]);
        for s in both() {
            let e = hermitian_eig_with(s, &m, &EigOptions::default()).unwrap();
            assert_eq!(e.values, vec![3.0, 1.0]);
            assert_eq!(e.basis, Matrix::identity(2), "{}", s.name());
        }
    }

    #[test]
    fn two_by_two_swap() {
        let m =
            HermitianMatrix::new(Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap())
                .unwrap();
        for s in both() {
            let e = hermitian_eig_with(s, &m, &EigOptions::default()).unwrap();
            assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-15);
            assert_relative_eq!(e.values[1], -1.0, epsilon = 1e-15);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            assert_relative_eq!(e.basis[(0, 0)], r, epsilon = 1e-15);
            assert_relative_eq!(e.basis[(1, 0)], r, epsilon = 1e-15);
        }
    }

    #[test]
    fn unknown_solver_is_config_error() {
        assert!(matches!(solver("lanczos"), Err(PerturbError::Config(_))));
        assert_eq!(registry().names(), vec!["householder-ql", "jacobi"]);
    }

    #[test]
    fn phase_normalisation() {
        let mut v = vec![Complex64::new(0.0, -2.0), Complex64::new(1.0, 0.0)];
        normalize_phase(&mut v);
        assert_eq!(v[0].im, 0.0);
        assert!(v[0].re > 0.0);
        assert_relative_eq!(crate::matcore::norm2(&v), 1.0, epsilon = 1e-15);
    }
}
