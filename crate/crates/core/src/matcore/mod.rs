//! Dense Hermitian matrix/vector arithmetic, ℓᵖ norms and the dense
//! eigendecomposition oracle.

pub mod eigen;
pub mod io;
mod matrix;
mod norms;
mod scalar;
mod spectrum;

pub use eigen::{
    eigenvalues, hermitian_eig, hermitian_eig_with, top_eigenpair, EigDecomposition, EigOptions,
    EigScalar, EigenSolver,
};
pub use matrix::{dot, norm2, normalized, HermitianMatrix, Matrix};
pub(crate) use norms::lp_norm_unchecked;
pub use norms::{
    column_sum_norm, dual_exponent, gap_exponent, lp_norm, lp_norm_real, operator_norm_exact,
    row_sum_norm, spectral_norm,
};
pub use scalar::{Scalar, ScalarKind};
pub use spectrum::Spectrum;
