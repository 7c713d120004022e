//! Leading eigenpairs of randomly perturbed Hermitian matrices, with
//! per-coordinate perturbation bounds and the experiments that test them.

// Negated float comparisons route NaN to the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrowhead;
pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod exponent;
pub mod matcore;
pub mod rs_solver;

pub use error::{PerturbError, Result};
