//! Scoring of user-supplied factor/code files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use disentangle_core::discretize::BinningSpec;
use disentangle_core::validate_pair;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Format, MetricSettings, RunConfig};
use crate::error::{InputError, InputResult};
use crate::io::{ensure_dir, fmt6, read_codes, read_factors, write_csv, write_json};
use crate::registry::{columns_of, evaluate};
use crate::summary::{summarize, ColumnSummary};

#[derive(Debug, Clone)]
pub struct ScoreArgs {
    pub factors: PathBuf,
    pub codes: PathBuf,
    pub sidecar: Option<PathBuf>,
    pub config: RunConfig,
    pub seed: u64,
    pub jobs: usize,
    pub formats: Vec<Format>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub factors: String,
    pub codes: String,
    pub num_samples: usize,
    pub factor_names: Vec<String>,
    pub code_names: Vec<String>,
    pub seeds: Vec<u64>,
    pub metrics: Vec<String>,
    pub settings: MetricSettings,
    pub columns: Vec<ColumnSummary>,
    pub wall_time_seconds: f64,
}

impl ScoreReport {
    pub fn failures(&self) -> usize {
        self.columns.iter().filter(|c| c.failed()).count()
    }
}

pub fn thread_pool(jobs: usize) -> InputResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| InputError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Reads the inputs, runs every configured metric for every seed and writes
/// the report files. Metric failures are recorded, not raised.
pub fn run_score(args: &ScoreArgs) -> InputResult<ScoreReport> {
    let start = Instant::now();
    let factors = read_factors(&args.factors, args.sidecar.as_deref())?;
    let codes = read_codes(&args.codes)?;
    validate_pair(&factors, &codes)?;
    let metrics = args.config.resolve_metrics()?;
    let seeds = if args.config.seeds.is_empty() {
        vec![args.seed]
    } else {
        args.config.seeds.clone()
    };
    let settings = &args.config.settings;
    let binning = BinningSpec::empirical(settings.factor_bins);
    let runs: Vec<_> = thread_pool(args.jobs)?.install(|| {
        seeds
            .par_iter()
            .map(|&s| (s, evaluate(&metrics, &factors, &codes, binning, settings, s)))
            .collect()
    });
    let columns = summarize(&columns_of(&metrics), &runs);
    let report = ScoreReport {
        factors: args.factors.display().to_string(),
        codes: args.codes.display().to_string(),
        num_samples: factors.num_samples(),
        factor_names: factors.names().to_vec(),
        code_names: codes.names().to_vec(),
        seeds,
        metrics: metrics.iter().map(|m| m.name().to_string()).collect(),
        settings: settings.clone(),
        columns,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    write_score(&report, &args.out, &args.formats)?;
    Ok(report)
}

pub fn write_score(report: &ScoreReport, out: &Path, formats: &[Format]) -> InputResult<()> {
    ensure_dir(out)?;
    if formats.contains(&Format::Json) {
        write_json(&out.join("scores.json"), report)?;
    }
    if formats.contains(&Format::Csv) {
        let rows: Vec<Vec<String>> = report
            .columns
            .iter()
            .map(|c| {
                vec![
                    c.column.clone(),
                    c.property
                        .map(|p| serde_json::to_value(p).expect("unit enum").as_str().unwrap_or("").to_string())
                        .unwrap_or_default(),
                    c.mean.map(fmt6).unwrap_or_default(),
                    c.std.map(fmt6).unwrap_or_default(),
                ]
            })
            .collect();
        write_csv(&out.join("scores.csv"), &["metric", "property", "mean", "std"], &rows)?;
    }
    Ok(())
}
