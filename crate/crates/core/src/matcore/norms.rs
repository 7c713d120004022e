use super::eigen;
use super::matrix::{HermitianMatrix, Matrix};
use super::scalar::Scalar;
use crate::error::{PerturbError, Result};

/// ℓᵖ norm; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm<T: Scalar>(v: &[T], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(PerturbError::Domain(format!(
            "lp_norm needs p >= 1, got {p}"
        )));
    }
    if v.is_empty() {
        return Err(PerturbError::Domain("lp_norm of an empty vector".into()));
    }
    Ok(lp_norm_unchecked(v.iter().map(|x| x.abs()), p))
}

/// ℓᵖ norm over magnitudes, with `p` already validated.  Scales by the max
/// entry so large exponents do not overflow.
pub(crate) fn lp_norm_unchecked(mags: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let m = mags.clone().fold(0.0, f64::max);
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return mags.sum();
    }
    if p == 2.0 {
        return m * mags.map(|a| (a / m) * (a / m)).sum::<f64>().sqrt();
    }
    m * mags.map(|a| (a / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn lp_norm_real(v: &[f64], p: f64) -> Result<f64> {
    lp_norm(v, p)
}

/// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
pub fn dual_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Exponent `p/(p−2)` used for gap vectors: ∞ at `p = 2`, 1 at `p = ∞`.
pub fn gap_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 2.0 {
        f64::INFINITY
    } else {
        p / (p - 2.0)
    }
}

/// Max column absolute sum.
pub fn column_sum_norm<T: Scalar>(m: &Matrix<T>) -> f64 {
    let mut sums = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (s, x) in sums.iter_mut().zip(m.row(i)) {
            *s += x.abs();
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// Max row absolute sum.
pub fn row_sum_norm<T: Scalar>(m: &Matrix<T>) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn spectral_norm<T: Scalar>(m: &Matrix<T>) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    if m.is_hermitian_exact() {
        let h = HermitianMatrix::new(m.clone())?;
        let ev = eigen::eigenvalues(&h)?;
        return Ok(ev.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    // Gram matrix of the thinner side.
    let gram = if m.cols() <= m.rows() {
        m.adjoint_matmul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    let h = HermitianMatrix::from_upper(&gram);
    let top = eigen::eigenvalues(&h)?[0];
    Ok(top.max(0.0).sqrt())
}

/// Exact ℓᵖ→ℓᵖ operator norm for `p ∈ {1, 2, ∞}`.
pub fn operator_norm_exact<T: Scalar>(m: &Matrix<T>, p: f64) -> Result<f64> {
    if p == 1.0 {
        Ok(column_sum_norm(m))
    } else if p.is_infinite() && p > 0.0 {
        Ok(row_sum_norm(m))
    } else if p == 2.0 {
        spectral_norm(m)
    } else {
        Err(PerturbError::UnsupportedExponent(p))
    }
}
