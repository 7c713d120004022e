use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::error::{PerturbError, Result};

pub type Stats = BTreeMap<String, f64>;

/// Statistics of one Monte Carlo draw.  Booleans are stored as 0/1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub kind: String,
    pub n: usize,
    pub trial_index: usize,
    pub stream: u64,
    pub statistics: Stats,
}

impl TrialRecord {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.statistics.get(name).copied()
    }

    /// Like [`get`](Self::get) but reports a missing statistic as an error.
    pub fn stat(&self, name: &str) -> Result<f64> {
        self.get(name).ok_or_else(|| {
            PerturbError::Config(format!(
                "record of kind `{}` has no statistic `{name}`",
                self.kind
            ))
        })
    }

    pub fn flag(&self, name: &str) -> bool {
        self.get(name) == Some(1.0)
    }
}

const FIXED_COLUMNS: [&str; 4] = ["kind", "n", "trial_index", "stream"];

fn check_exportable(records: &[TrialRecord]) -> Result<Vec<String>> {
    let first = records
        .first()
        .ok_or_else(|| PerturbError::Config("no records to export".into()))?;
    if first.statistics.is_empty() {
        return Err(PerturbError::Config("records carry no statistics".into()));
    }
    let names: Vec<String> = first.statistics.keys().cloned().collect();
    for r in records {
        if !r.statistics.keys().eq(names.iter()) {
            return Err(PerturbError::Config(format!(
                "record ({}, {}) has a different statistic set",
                r.n, r.trial_index
            )));
        }
        if let Some((k, v)) = r.statistics.iter().find(|(_, v)| !v.is_finite()) {
            return Err(PerturbError::Config(format!(
                "statistic `{k}` = {v} is not finite"
            )));
        }
    }
    Ok(names)
}

/// CSV with columns `kind,n,trial_index,stream,<sorted statistic names>`.
/// Reals use Rust's shortest round-trip formatting.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let names = check_exportable(records)?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = FIXED_COLUMNS
        .iter()
        .copied()
        .chain(names.iter().map(String::as_str))
        .collect();
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.kind.clone(),
            r.n.to_string(),
            r.trial_index.to_string(),
            r.stream.to_string(),
        ];
        row.extend(r.statistics.values().map(|v| format!("{v}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    check_exportable(records)?;
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn export_records(records: &[TrialRecord], format: OutputFormat, path: &Path) -> Result<()> {
    check_exportable(records)?;
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(records, &mut out)?,
        OutputFormat::Json => write_json(records, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header.len() < FIXED_COLUMNS.len() || header[..4] != FIXED_COLUMNS {
        return Err(PerturbError::Config(
            "CSV header must start with kind,n,trial_index,stream".into(),
        ));
    }
    let bad = |what: &str, v: &str| PerturbError::Config(format!("bad {what} `{v}` in CSV"));
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let mut statistics = Stats::new();
        for (name, v) in header[4..].iter().zip(row.iter().skip(4)) {
            statistics.insert(name.clone(), v.parse().map_err(|_| bad(name, v))?);
        }
        out.push(TrialRecord {
            kind: row[0].to_owned(),
            n: row[1].parse().map_err(|_| bad("n", &row[1]))?,
            trial_index: row[2].parse().map_err(|_| bad("trial_index", &row[2]))?,
            stream: row[3].parse().map_err(|_| bad("stream", &row[3]))?,
            statistics,
        });
    }
    Ok(out)
}

pub fn read_json(text: &str) -> Result<Vec<TrialRecord>> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(&text),
        _ => read_json(&text),
    }
}
