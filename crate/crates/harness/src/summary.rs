//! Collapses per-seed metric outcomes into one summary per score column.

use disentangle_core::analysis::aggregate_seeds;
use disentangle_core::data::Property;
use disentangle_core::MetricReport;
use serde::{Deserialize, Serialize};

use crate::registry::Outcome;

/// Rounds to six decimals so JSON output matches the CSV precision.
pub fn round6(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: String,
    pub property: Option<Property>,
    /// Seeds that produced a value.
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// One entry per seed; `None` where the metric failed.
    pub per_seed: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_factor_mean: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

impl ColumnSummary {
    pub fn failed(&self) -> bool {
        !self.errors.is_empty()
    }
}

/// `runs` holds the seed and the outcomes of one evaluation each.
pub fn summarize(columns: &[&str], runs: &[(u64, Vec<Outcome>)]) -> Vec<ColumnSummary> {
    columns
        .iter()
        .map(|&column| {
            let mut reports: Vec<MetricReport> = Vec::new();
            let mut per_seed = Vec::with_capacity(runs.len());
            let mut warnings: Vec<String> = Vec::new();
            let mut errors = Vec::new();
            for (seed, outcomes) in runs {
                let Some(outcome) = outcomes.iter().find(|o| o.metric.columns().contains(&column)) else {
                    per_seed.push(None);
                    continue;
                };
                match &outcome.result {
                    Ok(reps) => {
                        let rep = reps.iter().find(|r| r.metric == column).expect("metric emits its columns");
                        per_seed.push(Some(round6(rep.overall)));
                        for w in &rep.warnings {
                            if !warnings.contains(w) {
                                warnings.push(w.clone());
                            }
                        }
                        reports.push(rep.clone());
                    }
                    Err(e) => {
                        per_seed.push(None);
                        errors.push(format!("seed {seed}: {e}"));
                    }
                }
            }
            let agg = aggregate_seeds(&reports).ok();
            ColumnSummary {
                column: column.to_string(),
                property: reports.first().map(|r| r.property),
                count: reports.len(),
                mean: agg.as_ref().map(|a| round6(a.mean)),
                std: agg.as_ref().map(|a| round6(a.std)),
                min: agg.as_ref().map(|a| round6(a.min)),
                max: agg.as_ref().map(|a| round6(a.max)),
                per_seed,
                per_factor_mean: agg
                    .and_then(|a| a.per_factor_mean)
                    .map(|v| v.into_iter().map(round6).collect()),
                warnings,
                errors,
            }
        })
        .collect()
}
