//! Seeded samplers for the random models: subgaussian Hermitian noise,
//! GOE/GUE, arrowhead noise and the inconsistency instance, plus the
//! deterministic spectrum families.

mod dist;
pub mod registry;
mod samplers;
mod seed;
mod spec;

pub use dist::EntryDistribution;
pub use registry::{Ensemble, EnsembleSpec, NoiseEnsemble, NoiseScale};
pub use samplers::{
    arrowhead_g_from, arrowhead_matrix, embedded_goe_from, goe_from, gue_from, sample_arrowhead_g,
    sample_arrowhead_noise, sample_goe, sample_gue, sample_inconsistency_instance,
    sample_subgaussian_hermitian, subgaussian_complex, subgaussian_real, GOE_CONVENTION,
    GUE_CONVENTION,
};
pub use seed::{derive_stream, Seed};
pub use spec::{realize_spectrum, SpectrumFamily, SpectrumSpec};
