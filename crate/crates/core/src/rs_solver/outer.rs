use serde::{Deserialize, Serialize};

use super::inner::{pnorm, InnerSolver};
use super::partition::PartitionedPerturbation;
use crate::error::{PerturbError, Result};
use crate::matcore::{norm2, Scalar};

/// Stopping rules and iteration caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationControl {
    pub tol: f64,
    pub inner_cap: usize,
    pub outer_cap: usize,
}

impl IterationControl {
    /// Caps are `max(200, 10·log₂(1/tol))`.
    pub fn with_tol(tol: f64) -> Self {
        let cap = default_cap(tol);
        Self {
            tol,
            inner_cap: cap,
            outer_cap: cap,
        }
    }
}

impl Default for IterationControl {
    fn default() -> Self {
        Self::with_tol(1e-12)
    }
}

pub fn default_cap(tol: f64) -> usize {
    let bits = if tol > 0.0 && tol < 1.0 {
        (10.0 * (1.0 / tol).log2()).ceil() as usize
    } else {
        0
    };
    bits.max(200)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QStats {
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    /// `‖𝓛q − E₂₁ + q(E₁₂q)‖₂`.
    pub fixed_point_residual: f64,
    /// Last observed `‖D(q^{s+1} − q^s)‖_p / ‖D(q^s − q^{s−1})‖_p`.
    pub last_ratio: f64,
}

fn e12_dot<T: Scalar>(e12: &[T], q: &[T]) -> T {
    e12.iter()
        .zip(q)
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// `𝓛q − E₂₁ + q(E₁₂q)`.
pub fn fixed_point_residual<T: Scalar>(
    inner: &InnerSolver<T>,
    part: &PartitionedPerturbation<T>,
    q: &[T],
) -> Vec<T> {
    let s = e12_dot(&part.e12, q);
    inner
        .apply_l(q)
        .iter()
        .zip(&part.e21)
        .zip(q)
        .map(|((&l, &e), &qj)| l - e + qj * s)
        .collect()
}

/// Outer recursion `q^{s+1} = 𝓛⁻¹(E₂₁ − q^s(E₁₂q^s))` from `q^0 = 0`.
/// Stops when `‖D(q^{s+1} − q^s)‖_p ≤ tol·max(1, ‖Dq^{s+1}‖_p)`.
pub fn solve_q<T: Scalar>(
    part: &PartitionedPerturbation<T>,
    inner: &InnerSolver<T>,
    ctl: &IterationControl,
) -> Result<(Vec<T>, QStats)> {
    let k = part.e12.len();
    let p = inner.p;
    let inner_tol = ctl.tol / 10.0;
    let mut q = vec![T::zero(); k];
    let mut inner_total = 0;
    let mut prev_step = f64::NAN;
    let mut ratio = 0.0;
    let mut growing = 0;

    for s in 1..=ctl.outer_cap {
        let c = e12_dot(&part.e12, &q);
        let rhs: Vec<T> = part
            .e21
            .iter()
            .zip(&q)
            .map(|(&e, &qj)| e - qj * c)
            .collect();
        let (next, it) = inner.apply_inverse(&rhs, inner_tol, ctl.inner_cap)?;
        inner_total += it;
        let diff: Vec<T> = next.iter().zip(&q).map(|(&a, &b)| a - b).collect();
        let step = pnorm(&inner.d.apply(&diff), p);
        let size = pnorm(&inner.d.apply(&next), p);
        q = next;
        if !step.is_finite() {
            return Err(PerturbError::NonConvergence {
                iterations: s,
                last_change: step,
            });
        }
        if prev_step > 0.0 {
            ratio = step / prev_step;
            growing = if ratio >= 1.0 { growing + 1 } else { 0 };
            if growing >= 3 {
                return Err(PerturbError::NonConvergence {
                    iterations: s,
                    last_change: step,
                });
            }
        }
        prev_step = step;
        if step <= ctl.tol * size.max(1.0) {
            let res = norm2(&fixed_point_residual(inner, part, &q));
            return Ok((
                q,
                QStats {
                    outer_iters: s,
                    inner_iters_total: inner_total,
                    fixed_point_residual: res,
                    last_ratio: ratio,
                },
            ));
        }
    }
    Err(PerturbError::NonConvergence {
        iterations: ctl.outer_cap,
        last_change: prev_step,
    })
}
