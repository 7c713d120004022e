//! Seeded Monte Carlo campaigns.  A config names a kind from the registry;
//! every `(n, trial)` pair gets its own random stream and yields one
//! [`TrialRecord`].

mod config;
pub mod kinds;
mod record;
mod runner;
pub mod summary;

pub use config::{ExperimentConfig, OutputFormat, OutputSpec};
pub use kinds::{registry, Experiment, ExperimentRegistry, TrialRunner};
pub use record::{
    export_records, read_csv, read_json, read_records, write_csv, write_json, Stats, TrialRecord,
};
pub use runner::{run_experiment, validate, write_outputs, ExperimentOutput, SummaryFile};
pub use summary::{summarize, GroupSummary, StatSummary, SummaryStats};
