use serde::{Deserialize, Serialize};

use crate::error::{PerturbError, Result};
use crate::matcore::{gap_exponent, lp_norm_real, Spectrum};

/// `d_j = 1/(λ₁ − λ_{j+1})`, `j = 1..n−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GapVector {
    pub d: Vec<f64>,
}

impl GapVector {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }
}

pub fn gap_vector(lambda: &Spectrum) -> Result<GapVector> {
    let top = lambda.top();
    let mut d = Vec::with_capacity(lambda.n() - 1);
    for (j, &l) in lambda.values()[1..].iter().enumerate() {
        let gap = top - l;
        if !(gap > 0.0) || !(1.0 / gap).is_finite() {
            return Err(PerturbError::InvalidSpectrum(format!(
                "gap λ₁ − λ_{} = {gap} is not positive",
                j + 2
            )));
        }
        d.push(1.0 / gap);
    }
    Ok(GapVector { d })
}

/// `√(p ln n)·n^{1/p}·‖w‖_{p/(p−2)}` for finite `p ≥ 2`, `ln n·‖w‖₁` at `p = ∞`.
fn weighted_k(w: &[f64], n: usize, p: f64) -> Result<f64> {
    if p.is_nan() || p < 2.0 {
        return Err(PerturbError::Domain(format!(
            "exponent must be in [2, inf], got {p}"
        )));
    }
    if n < 2 {
        return Err(PerturbError::Domain(format!("need n >= 2, got {n}")));
    }
    let ln = (n as f64).ln();
    let norm = lp_norm_real(w, gap_exponent(p))?;
    if p.is_infinite() {
        Ok(ln * norm)
    } else {
        Ok((p * ln).sqrt() * (n as f64).powf(1.0 / p) * norm)
    }
}

/// `n^{1/p}·‖w‖_{p/(p−2)}`, the part of `K` without the log factor.
pub fn scaled_gap_norm(w: &[f64], n: usize, p: f64) -> Result<f64> {
    let norm = lp_norm_real(w, gap_exponent(p))?;
    Ok(if p.is_infinite() {
        norm
    } else {
        (n as f64).powf(1.0 / p) * norm
    })
}

/// `K_{n,p}(λ)`.
pub fn k_np(lambda: &Spectrum, p: f64) -> Result<f64> {
    weighted_k(&gap_vector(lambda)?.d, lambda.n(), p)
}

/// 32 geometric points from 2 to `max(2, ln n)`, then ∞.  When
/// `ln n ≤ 2` the finite part is the single point 2.
pub fn default_p_grid(n: usize) -> Vec<f64> {
    let hi = (n as f64).ln().max(2.0);
    let m = if hi > 2.0 { 32 } else { 1 };
    let mut grid: Vec<f64> = (0..m)
        .map(|i| 2.0 * (hi / 2.0).powf(i as f64 / (m.max(2) - 1) as f64))
        .collect();
    grid[m - 1] = hi;
    grid.push(f64::INFINITY);
    grid
}

/// Minimiser of `K_{n,p}` over the grid; ties keep the first grid point.
pub fn best_p(lambda: &Spectrum, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(PerturbError::Domain("empty p grid".into()));
    }
    let d = gap_vector(lambda)?;
    let mut best = (grid[0], f64::INFINITY);
    for &p in grid {
        let k = weighted_k(&d.d, lambda.n(), p)?;
        if k < best.1 {
            best = (p, k);
        }
    }
    Ok(best)
}

/// `‖E‖₂/δ`.
pub fn davis_kahan_bound(lambda: &Spectrum, e_norm: f64) -> f64 {
    e_norm / lambda.eigengap()
}

/// `C·√(ln n)·‖d(λ)‖₂`.
pub fn rs_sin_theta_bound(lambda: &Spectrum, c: f64) -> Result<f64> {
    let d = gap_vector(lambda)?;
    Ok(c * (lambda.n() as f64).ln().sqrt() * lp_norm_real(&d.d, 2.0)?)
}

/// Diagonal of `D_μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MuVector {
    pub mu: Vec<f64>,
}

impl MuVector {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(PerturbError::Domain(
                "mu must be positive and finite".into(),
            ));
        }
        Ok(Self { mu })
    }

    /// `μ_j = c·(n+1−j)·ln³n`.
    pub fn weyl_profile(n: usize, c: f64) -> Result<Self> {
        let l3 = (n as f64).ln().powi(3);
        Self::new((1..=n).map(|j| c * (n + 1 - j) as f64 * l3).collect())
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }
}

/// `K_{n,p}` with `d` replaced by `1/μ`.
pub fn mu_assumption(mu: &MuVector, p: f64) -> Result<f64> {
    let w: Vec<f64> = mu.mu.iter().map(|m| 1.0 / m).collect();
    weighted_k(&w, mu.n(), p)
}
