use crate::bounds::opnorm_pp_upper;
use crate::error::{PerturbError, Result};
use crate::matcore::{lp_norm_unchecked, norm2, HermitianMatrix, Matrix, Scalar, Spectrum};

/// Certificates above this are rejected.
pub const DEFAULT_CERTIFICATE_LIMIT: f64 = 0.9;

/// `D = D_λ + E₁₁ I` stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedGapOperator {
    pub d: Vec<f64>,
    pub lambda_head: f64,
}

pub fn build_shifted_gaps(lambda: &Spectrum, e11: f64) -> Result<ShiftedGapOperator> {
    let top = lambda.top();
    let mut d = Vec::with_capacity(lambda.n() - 1);
    for (j, &l) in lambda.values()[1..].iter().enumerate() {
        let v = top - l + e11;
        if !(v > 0.0) {
            return Err(PerturbError::GapCollapse {
                index: j + 1,
                value: v,
            });
        }
        d.push(v);
    }
    Ok(ShiftedGapOperator {
        d,
        lambda_head: top,
    })
}

impl ShiftedGapOperator {
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.d).map(|(&v, &d)| v.scale(d)).collect()
    }

    pub fn solve<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.d)
            .map(|(&v, &d)| v.scale(1.0 / d))
            .collect()
    }
}

pub(crate) fn pnorm<T: Scalar>(v: &[T], p: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    lp_norm_unchecked(v.iter().map(|x| x.abs()), p)
}

/// Solver for `𝓛x = y`, `𝓛 = D − E₂₂`, by the Jacobi iteration
/// `v ← E₂₂D⁻¹v + y`, `x = D⁻¹v`.  Construction certifies that
/// `‖E₂₂D⁻¹‖_{p,p}` is below the limit.
#[derive(Debug, Clone)]
pub struct InnerSolver<T> {
    pub d: ShiftedGapOperator,
    /// `E₂₂D⁻¹`.
    m: Matrix<T>,
    pub p: f64,
    pub certificate: f64,
}

impl<T: Scalar> InnerSolver<T> {
    pub fn new(
        d: ShiftedGapOperator,
        e22: &HermitianMatrix<T>,
        p: f64,
        limit: f64,
    ) -> Result<Self> {
        let k = d.d.len();
        if e22.n() != k {
            return Err(PerturbError::DimensionMismatch {
                expected: k,
                found: e22.n(),
            });
        }
        let src = e22.matrix();
        let m = Matrix::from_fn(k, k, |i, j| src[(i, j)].scale(1.0 / d.d[j]));
        let certificate = opnorm_pp_upper(&m, p)?;
        if !(certificate <= limit) {
            return Err(PerturbError::ContractionFailure {
                bound: certificate,
                limit,
            });
        }
        Ok(Self {
            d,
            m,
            p,
            certificate,
        })
    }

    /// Returns `x` with `‖𝓛x − y‖₂ ≤ tol·‖y‖₂` and the iteration count.
    pub fn apply_inverse(&self, y: &[T], tol: f64, cap: usize) -> Result<(Vec<T>, usize)> {
        let ynorm = norm2(y);
        if ynorm == 0.0 {
            return Ok((vec![T::zero(); y.len()], 0));
        }
        let mut v = y.to_vec();
        for it in 1..=cap {
            let mut next = self.m.matvec(&v);
            for (a, &b) in next.iter_mut().zip(y) {
                *a += b;
            }
            // 𝓛D⁻¹v − y = v − next, so the step is the residual of the previous iterate.
            let step = v
                .iter()
                .zip(&next)
                .map(|(&a, &b)| (a - b).abs_sq())
                .sum::<f64>()
                .sqrt();
            v = next;
            if step <= tol * ynorm {
                return Ok((self.d.solve(&v), it));
            }
            if !step.is_finite() {
                break;
            }
        }
        Err(PerturbError::ContractionFailure {
            bound: self.certificate,
            limit: 1.0,
        })
    }

    /// `𝓛x = Dx − E₂₂x`.
    pub fn apply_l(&self, x: &[T]) -> Vec<T> {
        let dx = self.d.apply(x);
        let ex = self.m.matvec(&dx);
        dx.iter().zip(&ex).map(|(&a, &b)| a - b).collect()
    }
}

/// One-shot form: certify, then iterate.
pub fn jacobi_apply_linv<T: Scalar>(
    d: &ShiftedGapOperator,
    e22: &HermitianMatrix<T>,
    y: &[T],
    p: f64,
    tol: f64,
    cap: usize,
) -> Result<(Vec<T>, usize)> {
    InnerSolver::new(d.clone(), e22, p, DEFAULT_CERTIFICATE_LIMIT)?.apply_inverse(y, tol, cap)
}
