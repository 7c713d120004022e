use crate::error::{PerturbError, Result};
use crate::matcore::{EigDecomposition, HermitianMatrix, Matrix, Scalar};

/// `Ẽ = (u, U_⊥)* E (u, U_⊥)` split as `[[e11, e12], [e21, e22]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedPerturbation<T> {
    pub e11: f64,
    /// Row `u* E U_⊥`.
    pub e12: Vec<T>,
    /// Column `U_⊥* E u`, the exact conjugate of `e12`.
    pub e21: Vec<T>,
    pub e22: HermitianMatrix<T>,
}

fn is_identity<T: Scalar>(m: &Matrix<T>) -> bool {
    let n = m.rows();
    (0..n).all(|i| (0..n).all(|j| m[(i, j)] == if i == j { T::one() } else { T::zero() }))
}

pub fn partition<T: Scalar>(
    eig: &EigDecomposition<T>,
    e: &HermitianMatrix<T>,
) -> Result<PartitionedPerturbation<T>> {
    let n = eig.n();
    if e.n() != n {
        return Err(PerturbError::DimensionMismatch {
            expected: n,
            found: e.n(),
        });
    }
    if n < 2 {
        return Err(PerturbError::Domain("partition needs n >= 2".into()));
    }
    let rotated;
    let et = if is_identity(&eig.basis) {
        e.matrix()
    } else {
        rotated = eig.basis.adjoint_matmul(&e.matrix().matmul(&eig.basis));
        &rotated
    };
    let e12: Vec<T> = et.row(0)[1..].to_vec();
    let e21: Vec<T> = e12.iter().map(|x| x.conj()).collect();
    let e22 = HermitianMatrix::from_upper_fn(n - 1, |j, k| et[(j + 1, k + 1)]);
    Ok(PartitionedPerturbation {
        e11: et[(0, 0)].re(),
        e12,
        e21,
        e22,
    })
}

impl<T: Scalar> PartitionedPerturbation<T> {
    pub fn n(&self) -> usize {
        self.e12.len() + 1
    }

    /// Block matrix `Ẽ`.
    pub fn assemble_blocks(&self) -> Matrix<T> {
        let n = self.n();
        Matrix::from_fn(n, n, |j, k| match (j, k) {
            (0, 0) => T::from_real(self.e11),
            (0, k) => self.e12[k - 1],
            (j, 0) => self.e21[j - 1],
            (j, k) => self.e22[(j - 1, k - 1)],
        })
    }

    /// `U Ẽ U*`, which should reproduce `E`.
    pub fn reassemble(&self, eig: &EigDecomposition<T>) -> Matrix<T> {
        eig.basis
            .matmul(&self.assemble_blocks())
            .matmul(&eig.basis.adjoint())
    }
}
