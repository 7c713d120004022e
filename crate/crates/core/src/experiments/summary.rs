use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of ones, for statistics whose every value is 0 or 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub kind: String,
    pub n: usize,
    pub count: usize,
    pub stats: BTreeMap<String, StatSummary>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SummaryStats {
    pub groups: Vec<GroupSummary>,
}

impl SummaryStats {
    pub fn group(&self, kind: &str, n: usize) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.kind == kind && g.n == n)
    }
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (position `q·(m−1)`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (denominator `m − 1`); zero for one value.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn summarize_values(values: &[f64]) -> StatSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = mean(values);
    let boolean = values.iter().all(|&v| v == 0.0 || v == 1.0);
    StatSummary {
        mean: m,
        p50: quantile_sorted(&sorted, 0.50),
        p95: quantile_sorted(&sorted, 0.95),
        p99: quantile_sorted(&sorted, 0.99),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        frequency: boolean.then_some(m),
    }
}

/// Groups by `(kind, n)` in sorted order.  Values are taken in record order,
/// so the result depends only on the records.
pub fn summarize(records: &[TrialRecord]) -> SummaryStats {
    let mut groups: BTreeMap<(&str, usize), BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    let mut counts: BTreeMap<(&str, usize), usize> = BTreeMap::new();
    for r in records {
        let key = (r.kind.as_str(), r.n);
        *counts.entry(key).or_default() += 1;
        let g = groups.entry(key).or_default();
        for (name, &v) in &r.statistics {
            g.entry(name.as_str()).or_default().push(v);
        }
    }
    SummaryStats {
        groups: groups
            .into_iter()
            .map(|((kind, n), stats)| GroupSummary {
                kind: kind.to_owned(),
                n,
                count: counts[&(kind, n)],
                stats: stats
                    .into_iter()
                    .map(|(name, vals)| (name.to_owned(), summarize_values(&vals)))
                    .collect(),
            })
            .collect(),
    }
}

/// Values of one statistic over the records of size `n`, in record order.
pub fn column(records: &[TrialRecord], n: usize, name: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.n == n)
        .filter_map(|r| r.get(name))
        .collect()
}
