//! Leading eigenpair of `Ã = A + E` by the nonasymptotic Rayleigh–Schrödinger
//! construction: partition `E` in the eigenbasis of `A`, solve
//! `𝓛q = E₂₁ − q(E₁₂q)` with two nested fixed-point loops, assemble
//! `ũ = (u + U_⊥q)/√(1 + ‖q‖²)` and certify it against the dense oracle.

mod assemble;
mod domination;
mod inner;
mod outer;
mod partition;
mod report;

pub use assemble::{assemble_eigvec, coordinate_bounds, eigenvalue_from_q, overlap_ratios};
pub use domination::{verify_shifted_domination, Domination};
pub use inner::{
    build_shifted_gaps, jacobi_apply_linv, InnerSolver, ShiftedGapOperator,
    DEFAULT_CERTIFICATE_LIMIT,
};
pub use outer::{default_cap, fixed_point_residual, solve_q, IterationControl, QStats};
pub use partition::{partition, PartitionedPerturbation};
pub use report::{
    verify_solution, RsSolver, SolveOptions, SolverReport, METHOD_FALLBACK, METHOD_RS,
};
