use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OutputFormat};
use super::kinds::registry;
use super::record::{export_records, TrialRecord};
use super::summary::{summarize, SummaryStats};
use crate::ensembles::Seed;
use crate::error::{PerturbError, Result};

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ExperimentConfig,
    pub n_list: Vec<usize>,
    pub ensemble_convention: String,
    pub summary: SummaryStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: SummaryStats,
    pub n_list: Vec<usize>,
    pub ensemble_convention: String,
}

/// Checks the config against the kind registry and returns the sizes to run.
pub fn validate(cfg: &ExperimentConfig) -> Result<Vec<usize>> {
    cfg.check_basic()?;
    let kind = registry().get(&cfg.kind)?;
    Ok(cfg.n_list.clone().unwrap_or_else(|| kind.default_n_list()))
}

/// Runs every `(n, trial)` pair on `threads` workers (all cores when `None`).
/// Trial `t` at size `n` draws from stream `hash(seed, n, t)`, so the records
/// do not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    let n_list = validate(cfg)?;
    let kind = registry().get(&cfg.kind)?;
    let schema = kind.schema();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| PerturbError::Config(format!("thread pool: {e}")))?;

    let mut records = Vec::with_capacity(n_list.len() * cfg.trials);
    for &n in &n_list {
        let runner = kind.prepare(cfg, n)?;
        let batch: Vec<Result<TrialRecord>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = Seed::for_trial(cfg.seed, n, t);
                    let statistics = runner.run(seed)?;
                    if !statistics
                        .keys()
                        .map(String::as_str)
                        .eq(schema.iter().copied())
                    {
                        return Err(PerturbError::Config(format!(
                            "kind `{}` produced statistics outside its schema",
                            cfg.kind
                        )));
                    }
                    if let Some((k, v)) = statistics.iter().find(|(_, v)| !v.is_finite()) {
                        return Err(PerturbError::NumericFailure {
                            what: format!("statistic `{k}` at n = {n}, trial {t}"),
                            residual: *v,
                        });
                    }
                    Ok(TrialRecord {
                        kind: cfg.kind.clone(),
                        n,
                        trial_index: t,
                        stream: seed.stream,
                        statistics,
                    })
                })
                .collect()
        });
        for r in batch {
            records.push(r?);
        }
    }
    records.sort_by_key(|r| (r.n, r.trial_index));

    Ok(ExperimentOutput {
        summary: summarize(&records),
        ensemble_convention: kind.convention(cfg)?,
        n_list,
        records,
    })
}

/// Writes `records.<ext>` and `summary.json` into `dir`, returning their paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    out: &ExperimentOutput,
    dir: &Path,
    format: OutputFormat,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let records_path = dir.join(format!("records.{}", format.extension()));
    export_records(&out.records, format, &records_path)?;
    let summary_path = dir.join("summary.json");
    let file = SummaryFile {
        config: cfg.clone(),
        n_list: out.n_list.clone(),
        ensemble_convention: out.ensemble_convention.clone(),
        summary: out.summary.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(&summary_path, text)?;
    Ok((records_path, summary_path))
}
