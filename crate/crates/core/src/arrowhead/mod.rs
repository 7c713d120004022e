//! Top eigenpair of `diag(λ) + [[0, gᵀ], [g, 0]]` from the secular equation
//! `γ = Σ_j g_j²/(λ₁ − λ_{j+1} + γ)`, and the coordinatewise lower-bound check.

use serde::{Deserialize, Serialize};

use crate::error::{PerturbError, Result};
use crate::matcore::Spectrum;

pub const DEFAULT_TOL: f64 = 1e-13;

/// Neumaier compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() {
            (s - t) + x
        } else {
            (x - t) + s
        };
        s = t;
    }
    s + c
}

fn gaps(lambda: &Spectrum, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() + 1 != lambda.n() {
        return Err(PerturbError::DimensionMismatch {
            expected: lambda.n() - 1,
            found: g.len(),
        });
    }
    let top = lambda.top();
    Ok(lambda.values()[1..].iter().map(|l| top - l).collect())
}

/// `γ − Σ g_j²/(gap_j + γ)`.
pub fn secular_residual(gap: &[f64], g: &[f64], gamma: f64) -> f64 {
    gamma - compensated_sum(g.iter().zip(gap).map(|(&gj, &dj)| gj * gj / (dj + gamma)))
}

/// Positive root of the secular equation.  The map is increasing and
/// concave, so Newton from `γ = 0` climbs monotonically to the root; a
/// bisection step on the bracket `[0, Σ g_j²/gap_j]` guards rounding.
pub fn solve_gamma(lambda: &Spectrum, g: &[f64], tol: f64) -> Result<f64> {
    let gap = gaps(lambda, g)?;
    if g.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = compensated_sum(g.iter().zip(&gap).map(|(&gj, &dj)| gj * gj / dj));
    let mut gamma = 0.0;
    for _ in 0..200 {
        let f = secular_residual(&gap, g, gamma);
        if f.abs() <= 0.25 * tol * gamma.max(1.0) {
            return Ok(gamma);
        }
        if f < 0.0 {
            lo = gamma;
        } else {
            hi = gamma;
        }
        let df = 1.0
            + compensated_sum(
                g.iter()
                    .zip(&gap)
                    .map(|(&gj, &dj)| gj * gj / (dj + gamma).powi(2)),
            );
        let next = gamma - f / df;
        gamma = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let res = secular_residual(&gap, g, gamma);
    if res.abs() <= tol * gamma.max(1.0) {
        Ok(gamma)
    } else {
        Err(PerturbError::NumericFailure {
            what: "secular equation did not converge".into(),
            residual: res,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecularSolution {
    pub gamma: f64,
    /// `ρ_j = g_j²/(λ₁ − λ_{j+1} + γ)`.
    pub rho: Vec<f64>,
    /// First coordinate of the top eigenvector.
    pub a: f64,
    /// Remaining coordinates.
    pub w: Vec<f64>,
    pub top_eigenvalue: f64,
    pub secular_residual: f64,
    /// `‖(M − (λ₁+γ)I)(a, w)‖₂` for the arrowhead matrix `M`.
    pub eig_residual: f64,
}

impl SecularSolution {
    pub fn eigenvector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w.len() + 1);
        v.push(self.a);
        v.extend_from_slice(&self.w);
        v
    }
}

/// `a = (1 + Σ g_j²/(gap_j+γ)²)^{−1/2}`, `w_j = g_j·a/(gap_j + γ)`.
pub fn arrowhead_eigvec(lambda: &Spectrum, g: &[f64], gamma: f64) -> Result<SecularSolution> {
    let gap = gaps(lambda, g)?;
    let ratio: Vec<f64> = g
        .iter()
        .zip(&gap)
        .map(|(&gj, &dj)| gj / (dj + gamma))
        .collect();
    let a = 1.0 / (1.0 + compensated_sum(ratio.iter().map(|r| r * r))).sqrt();
    let w: Vec<f64> = ratio.iter().map(|r| r * a).collect();
    let rho: Vec<f64> = ratio.iter().zip(g).map(|(r, gj)| r * gj).collect();
    let top = lambda.top() + gamma;

    // Row 0: λ₁a + gᵀw − top·a; rows j: g_j a + λ_{j+1} w_j − top·w_j.
    let head = lambda.top() * a + compensated_sum(g.iter().zip(&w).map(|(x, y)| x * y)) - top * a;
    let tail = g
        .iter()
        .zip(&w)
        .zip(&lambda.values()[1..])
        .map(|((&gj, &wj), &l)| (gj * a + (l - top) * wj).powi(2));
    let eig_residual = (head * head + compensated_sum(tail)).sqrt();

    Ok(SecularSolution {
        gamma,
        rho,
        a,
        w,
        top_eigenvalue: top,
        secular_residual: secular_residual(&gap, g, gamma),
        eig_residual,
    })
}

/// Solves for `γ` and the eigenvector in one call.
pub fn solve_arrowhead(lambda: &Spectrum, g: &[f64]) -> Result<SecularSolution> {
    let gamma = solve_gamma(lambda, g, DEFAULT_TOL)?;
    arrowhead_eigvec(lambda, g, gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCheck {
    pub holds: bool,
    /// `min_j (|w_j|·4(λ₁ − λ_{j+1})/|g_j| − 1)` over `g_j ≠ 0`.
    pub min_slack: Option<f64>,
}

/// Checks `|w_j| ≥ |g_j|/(4(λ₁ − λ_{j+1}))` for every `j`.
pub fn lower_bound_check(
    sol: &SecularSolution,
    lambda: &Spectrum,
    g: &[f64],
) -> Result<LowerBoundCheck> {
    let gap = gaps(lambda, g)?;
    let mut min_slack: Option<f64> = None;
    for ((&gj, &wj), &dj) in g.iter().zip(&sol.w).zip(&gap) {
        if gj == 0.0 {
            continue;
        }
        let s = wj.abs() * 4.0 * dj / gj.abs() - 1.0;
        min_slack = Some(min_slack.map_or(s, |m| m.min(s)));
    }
    Ok(LowerBoundCheck {
        holds: min_slack.is_none_or(|s| s >= 0.0),
        min_slack,
    })
}
