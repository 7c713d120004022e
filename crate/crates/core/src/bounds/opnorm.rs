//! ℓʳ → ℓˢ operator-norm estimates for dense matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensembles::Seed;
use crate::error::{PerturbError, Result};
use crate::matcore::{
    column_sum_norm, dual_exponent, lp_norm_unchecked, row_sum_norm, spectral_norm, Matrix, Scalar,
};

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(PerturbError::Domain(format!(
            "exponent must be in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// Riesz–Thorin bound `‖M‖_{1,1}^{1/p}·‖M‖_{∞,∞}^{1−1/p}` on `‖M‖_{p,p}`.
/// Exact at `p ∈ {1, ∞}`; at `p = 2` the exact spectral norm is used when smaller.
pub fn opnorm_pp_upper<T: Scalar>(m: &Matrix<T>, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let one = column_sum_norm(m);
    let inf = row_sum_norm(m);
    if p == 1.0 {
        return Ok(one);
    }
    if p.is_infinite() {
        return Ok(inf);
    }
    let rt = if one == 0.0 || inf == 0.0 {
        0.0
    } else {
        one.powf(1.0 / p) * inf.powf(1.0 - 1.0 / p)
    };
    if p == 2.0 {
        Ok(rt.min(spectral_norm(m)?))
    } else {
        Ok(rt)
    }
}

fn norm<T: Scalar>(v: &[T], p: f64) -> f64 {
    lp_norm_unchecked(v.iter().map(|x| x.abs()), p)
}

/// Dual vector of `y` for the ℓ^q norm: unit in ℓ^{q'} with `⟨ψ, y⟩ = ‖y‖_q`.
fn dual_map<T: Scalar>(y: &[T], q: f64) -> Vec<T> {
    let m = y.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return vec![T::zero(); y.len()];
    }
    if q.is_infinite() {
        let i = y.iter().position(|x| x.abs() == m).unwrap_or(0);
        let mut out = vec![T::zero(); y.len()];
        out[i] = y[i].phase();
        return out;
    }
    if q == 1.0 {
        return y
            .iter()
            .map(|x| if x.abs() == 0.0 { T::zero() } else { x.phase() })
            .collect();
    }
    let yn = norm(y, q) / m;
    y.iter()
        .map(|x| x.phase().scale(((x.abs() / m) / yn).powf(q - 1.0)))
        .collect()
}

/// Lower bound on `max { ‖Mu‖_s : ‖u‖_r ≤ 1 }` by the nonlinear power
/// method `u ← ψ_{r'}(M* ψ_s(Mu))`, started from the all-ones vector and
/// from `restarts` Gaussian vectors.  Every value returned is attained by
/// an explicit feasible `u`, so it is a valid lower bound.
pub fn opnorm_lower<T: Scalar>(
    m: &Matrix<T>,
    r: f64,
    s: f64,
    restarts: usize,
    seed: Seed,
) -> Result<f64> {
    check_exponent(r)?;
    check_exponent(s)?;
    let n = m.cols();
    if n == 0 || m.rows() == 0 || m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let r_dual = dual_exponent(r);
    let value = |u: &[T]| -> f64 {
        let un = norm(u, r);
        if un == 0.0 {
            0.0
        } else {
            norm(&m.matvec(u), s) / un
        }
    };

    let mut best = 0.0f64;
    for start in 0..=restarts {
        let mut u: Vec<T> = if start == 0 {
            vec![T::one(); n]
        } else {
            let mut rng = seed.child(start as u64).rng();
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = if T::KIND == crate::matcore::ScalarKind::Complex {
                        rng.sample(StandardNormal)
                    } else {
                        0.0
                    };
                    T::from_parts(re, im)
                })
                .collect()
        };
        let mut last = value(&u);
        best = best.max(last);
        for _ in 0..500 {
            let mu = m.matvec(&u);
            let z = m.adjoint_matvec(&dual_map(&mu, s));
            let next = dual_map(&z, r_dual);
            let v = value(&next);
            if !v.is_finite() {
                break;
            }
            best = best.max(v);
            let done = v <= last * (1.0 + 1e-13);
            u = next;
            last = v;
            if done {
                break;
            }
        }
    }
    Ok(best)
}

/// Lower estimate of `‖M‖_{p',p}` (`p ∈ [2, ∞]`).
pub fn opnorm_dual_lower<T: Scalar>(
    m: &Matrix<T>,
    p: f64,
    restarts: usize,
    seed: Seed,
) -> Result<f64> {
    if p.is_nan() || p < 2.0 {
        return Err(PerturbError::Domain(format!(
            "dual pairing needs p >= 2, got {p}"
        )));
    }
    opnorm_lower(m, dual_exponent(p), p, restarts, seed)
}
