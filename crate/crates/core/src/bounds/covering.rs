use crate::error::{PerturbError, Result};

/// Upper bound on the log covering number of the ellipsoid with semi-axes
/// `a`: `Σ_{a_j > 1} ln a_j + |{j : a_j² ≥ 1 − θ}|·ln(C̄/θ)`.
pub fn ellipsoid_covering_bound(a: &[f64], theta: f64, c_bar: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(PerturbError::Domain(format!(
            "theta must lie in (0, 1/2), got {theta}"
        )));
    }
    if a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(PerturbError::Domain("semi-axes must be positive".into()));
    }
    // |J|·ln h(a) = Σ_{j∈J} ln a_j
    let big: f64 = a.iter().filter(|&&x| x > 1.0).map(|x| x.ln()).sum();
    let near = a.iter().filter(|&&x| x * x >= 1.0 - theta).count();
    Ok(big + near as f64 * (c_bar / theta).ln())
}
