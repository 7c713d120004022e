use serde::{Deserialize, Serialize};

use super::gaps::{
    best_p, davis_kahan_bound, default_p_grid, gap_vector, k_np, rs_sin_theta_bound,
    scaled_gap_norm,
};
use crate::error::Result;
use crate::matcore::Spectrum;

pub const DEFAULT_C0: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRow {
    #[serde(with = "crate::exponent")]
    pub p: f64,
    /// `n^{1/p}·‖d‖_{p/(p−2)}`.
    pub scaled_gap_norm: f64,
    pub k: f64,
}

/// Assumption check on a spectrum over the default exponent grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub n: usize,
    pub d: Vec<f64>,
    pub table: Vec<PRow>,
    #[serde(with = "crate::exponent")]
    pub best_p: f64,
    pub k_best: f64,
    pub c0: f64,
    pub satisfied: bool,
    /// Nominal `‖E‖₂` fed to the Davis–Kahan bound.
    pub e_norm: f64,
    pub dk_bound: f64,
    /// `√(ln n)·‖d‖₂`, i.e. the sin θ bound with `C = 1`.
    pub rs_l2_bound: f64,
}

impl AssumptionReport {
    /// `e_norm` defaults to `2√n`, the GOE spectral edge.
    pub fn new(lambda: &Spectrum, c0: f64, e_norm: Option<f64>) -> Result<Self> {
        Self::with_grid(lambda, c0, e_norm, &default_p_grid(lambda.n()))
    }

    pub fn with_grid(
        lambda: &Spectrum,
        c0: f64,
        e_norm: Option<f64>,
        grid: &[f64],
    ) -> Result<Self> {
        let n = lambda.n();
        let d = gap_vector(lambda)?;
        let table = grid
            .iter()
            .map(|&p| {
                Ok(PRow {
                    p,
                    scaled_gap_norm: scaled_gap_norm(&d.d, n, p)?,
                    k: k_np(lambda, p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (best_p, k_best) = best_p(lambda, grid)?;
        let e_norm = e_norm.unwrap_or(2.0 * (n as f64).sqrt());
        Ok(Self {
            n,
            d: d.d,
            table,
            best_p,
            k_best,
            c0,
            satisfied: k_best <= c0,
            e_norm,
            dk_bound: davis_kahan_bound(lambda, e_norm),
            rs_l2_bound: rs_sin_theta_bound(lambda, 1.0)?,
        })
    }
}
