//! Kendall rank correlation between metrics over a table of scored
//! configurations.

use std::path::Path;

use disentangle_core::analysis::correlation_matrix;
use disentangle_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{InputError, InputResult};
use crate::io::{ensure_dir, write_csv, write_json, write_text};
use crate::svg::heatmap;

/// A bundled example table: metric scores for synthetic configurations.
pub const SAMPLE_TABLE: &str = include_str!("../data/sample_scores.csv");

/// Rows are configurations; the first column names them and every other
/// column holds one metric's scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub configs: Vec<String>,
    pub metrics: Vec<String>,
    /// `metrics × configs`.
    pub scores: Matrix,
}

impl ScoreTable {
    pub fn parse(text: &str, origin: &Path) -> InputResult<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| InputError::parse(origin, 1, e.to_string()))?
            .clone();
        let metrics: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        if metrics.len() < 2 {
            return Err(InputError::parse(origin, 1, "need at least 2 metric columns"));
        }
        let mut configs = Vec::new();
        let mut columns = vec![Vec::new(); metrics.len()];
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                InputError::parse(origin, line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            configs.push(record.get(0).unwrap_or_default().to_string());
            for (j, field) in record.iter().skip(1).enumerate() {
                let v: f64 = field
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| InputError::parse(origin, line, format!("column '{}': bad score '{field}'", metrics[j])))?;
                columns[j].push(v);
            }
        }
        if configs.len() < 2 {
            return Err(InputError::parse(origin, 2, "need at least 2 configurations"));
        }
        let scores = Matrix::from_columns(&columns)?;
        // from_columns makes configs × metrics; store the transpose
        let mut t = Matrix::zeros(metrics.len(), configs.len());
        for i in 0..configs.len() {
            for j in 0..metrics.len() {
                t.set(j, i, scores.get(i, j));
            }
        }
        Ok(Self {
            configs,
            metrics,
            scores: t,
        })
    }

    pub fn load(path: &Path) -> InputResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KendallMatrix {
    pub metrics: Vec<String>,
    pub num_configs: usize,
    /// Tau ×100, rounded to integers.
    pub tau_x100: Vec<Vec<i64>>,
}

pub fn kendall_matrix(table: &ScoreTable) -> InputResult<KendallMatrix> {
    let m = correlation_matrix(&table.scores)?;
    Ok(KendallMatrix {
        metrics: table.metrics.clone(),
        num_configs: table.configs.len(),
        tau_x100: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m.get(i, j).round() as i64).collect())
            .collect(),
    })
}

pub fn write_compare(k: &KendallMatrix, out: &Path, formats: &[Format]) -> InputResult<()> {
    ensure_dir(out)?;
    if formats.contains(&Format::Csv) {
        let mut header = vec!["metric"];
        header.extend(k.metrics.iter().map(String::as_str));
        let rows: Vec<Vec<String>> = k
            .metrics
            .iter()
            .zip(&k.tau_x100)
            .map(|(name, row)| std::iter::once(name.clone()).chain(row.iter().map(i64::to_string)).collect())
            .collect();
        write_csv(&out.join("kendall.csv"), &header, &rows)?;
    }
    if formats.contains(&Format::Json) {
        write_json(&out.join("kendall.json"), k)?;
    }
    if formats.contains(&Format::Svg) {
        write_text(
            &out.join("kendall.svg"),
            &heatmap("Kendall rank correlation (x100)", &k.metrics, &k.tau_x100),
        )?;
    }
    Ok(())
}
