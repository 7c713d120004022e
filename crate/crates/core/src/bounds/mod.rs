//! Closed-form quantities on spectra and matrices: gap vectors, the
//! assumption constant `K_{n,p}`, ℓ² comparison bounds, the ellipsoid
//! covering bound and ℓᵖ operator-norm estimators.

mod covering;
mod gaps;
mod opnorm;
mod report;

pub use covering::ellipsoid_covering_bound;
pub use gaps::{
    best_p, davis_kahan_bound, default_p_grid, gap_vector, k_np, mu_assumption, rs_sin_theta_bound,
    scaled_gap_norm, GapVector, MuVector,
};
pub use opnorm::{opnorm_dual_lower, opnorm_lower, opnorm_pp_upper};
pub use report::{AssumptionReport, PRow, DEFAULT_C0};

/// Default `C̄` in the covering bound.
pub const DEFAULT_C_BAR: f64 = std::f64::consts::E;
