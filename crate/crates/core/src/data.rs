//! Shared data model: dense sample matrices, importance matrices and
//! per-metric reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix buffer length",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let cols = columns.len();
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    what: "column length",
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            data.extend(columns.iter().map(|c| c[r]));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        Matrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Position of the first NaN or infinity in row-major order.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Continuous,
    Categorical,
}

/// N realizations of M ground-truth factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrix {
    values: Matrix,
    names: Vec<String>,
    kinds: Vec<FactorKind>,
}

impl FactorMatrix {
    pub fn new(values: Matrix, names: Vec<String>, kinds: Vec<FactorKind>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        check_len("factor names", values.ncols(), names.len())?;
        check_len("factor kinds", values.ncols(), kinds.len())?;
        for (c, kind) in kinds.iter().enumerate() {
            if *kind == FactorKind::Categorical {
                for r in 0..values.nrows() {
                    let v = values.get(r, c);
                    if v.is_finite() && (v < 0.0 || v.fract() != 0.0) {
                        return Err(Error::InvalidCategory { factor: c, row: r });
                    }
                }
            }
        }
        Ok(Self {
            values,
            names,
            kinds,
        })
    }

    /// All-continuous factors named `v0, v1, ...`.
    pub fn continuous(values: Matrix) -> Result<Self> {
        let m = values.ncols();
        Self::new(
            values,
            (0..m).map(|i| format!("v{i}")).collect(),
            vec![FactorKind::Continuous; m],
        )
    }

    pub fn num_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_factors(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.column(i)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::ZeroColumns);
        }
        Ok(Self {
            values: self.values.select_columns(idx),
            names: idx.iter().map(|&i| self.names[i].clone()).collect(),
            kinds: idx.iter().map(|&i| self.kinds[i]).collect(),
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            values: self.values.select_rows(idx),
            names: self.names.clone(),
            kinds: self.kinds.clone(),
        }
    }
}

/// N learned (or synthetic) codes of dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMatrix {
    values: Matrix,
    names: Vec<String>,
}

impl CodeMatrix {
    pub fn new(values: Matrix, names: Vec<String>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        check_len("code names", values.ncols(), names.len())?;
        Ok(Self { values, names })
    }

    /// Codes named `z0, z1, ...`.
    pub fn unnamed(values: Matrix) -> Result<Self> {
        let d = values.ncols();
        Self::new(values, (0..d).map(|j| format!("z{j}")).collect())
    }

    pub fn num_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_dims(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::ZeroColumns);
        }
        Ok(Self {
            values: self.values.select_columns(idx),
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            values: self.values.select_rows(idx),
            names: self.names.clone(),
        }
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// Checks that factors and codes describe the same samples and hold only
/// finite values. The pair is handed back untouched.
pub fn validate_pair<'a>(
    factors: &'a FactorMatrix,
    codes: &'a CodeMatrix,
) -> Result<(&'a FactorMatrix, &'a CodeMatrix)> {
    if factors.num_samples() != codes.num_samples() {
        return Err(Error::DimensionMismatch {
            what: "sample count of factors vs codes",
            expected: factors.num_samples(),
            found: codes.num_samples(),
        });
    }
    if let Some((row, col)) = factors.values().first_non_finite() {
        return Err(Error::NonFinite {
            matrix: "factors",
            row,
            col,
        });
    }
    if let Some((row, col)) = codes.values().first_non_finite() {
        return Err(Error::NonFinite {
            matrix: "codes",
            row,
            col,
        });
    }
    Ok((factors, codes))
}

/// Maps an accuracy from `[chance, 1]` onto `[0, 1]`; below-chance values clamp to 0.
pub fn rescale_by_chance(raw: f64, chance: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&chance) {
        return Err(Error::InvalidChance(chance));
    }
    Ok(((raw - chance) / (1.0 - chance)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImportanceSource {
    MutualInformation,
    Lasso,
    RandomForest,
    RSquared,
}

/// M×d nonnegative factor-code relevance weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceMatrix {
    weights: Matrix,
    source: ImportanceSource,
}

impl ImportanceMatrix {
    pub fn new(weights: Matrix, source: ImportanceSource) -> Result<Self> {
        if let Some((row, col)) = weights.first_non_finite() {
            return Err(Error::NonFinite {
                matrix: "importance",
                row,
                col,
            });
        }
        if let Some(p) = weights.as_slice().iter().position(|&w| w < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "negative importance at ({}, {})",
                p / weights.ncols(),
                p % weights.ncols()
            )));
        }
        Ok(Self { weights, source })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn source(&self) -> ImportanceSource {
        self.source
    }

    pub fn num_factors(&self) -> usize {
        self.weights.nrows()
    }

    pub fn num_codes(&self) -> usize {
        self.weights.ncols()
    }

    #[inline]
    pub fn get(&self, factor: usize, code: usize) -> f64 {
        self.weights.get(factor, code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Modularity,
    Compactness,
    Explicitness,
    Holistic,
}

/// How `overall` was derived from the per-factor or per-code vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Unweighted mean of `per_factor`.
    FactorMean,
    /// Unweighted mean of `per_code`.
    CodeMean,
    /// Weighted mean of `per_factor` with the given weights.
    FactorWeighted(Vec<f64>),
    /// Weighted mean of `per_code` with the given weights.
    CodeWeighted(Vec<f64>),
    /// Not derived from a per-factor or per-code vector.
    Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub property: Property,
    pub overall: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_factor: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_code: Option<Vec<f64>>,
    pub aggregation: Aggregation,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl MetricReport {
    pub fn scalar(metric: &str, property: Property, overall: f64, seed: u64) -> Self {
        Self {
            metric: metric.to_string(),
            property,
            overall,
            per_factor: None,
            per_code: None,
            aggregation: Aggregation::Scalar,
            seed,
            warnings: Vec::new(),
        }
    }

    /// Overall score is the plain mean of the per-factor scores.
    pub fn from_factors(metric: &str, property: Property, per_factor: Vec<f64>, seed: u64) -> Self {
        let overall = mean(&per_factor);
        Self {
            overall,
            per_factor: Some(per_factor),
            aggregation: Aggregation::FactorMean,
            ..Self::scalar(metric, property, 0.0, seed)
        }
    }

    /// Overall score is the plain mean of the per-code scores.
    pub fn from_codes(metric: &str, property: Property, per_code: Vec<f64>, seed: u64) -> Self {
        let overall = mean(&per_code);
        Self {
            overall,
            per_code: Some(per_code),
            aggregation: Aggregation::CodeMean,
            ..Self::scalar(metric, property, 0.0, seed)
        }
    }

    pub fn with_warning(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    /// Recomputes `overall` from the stored vectors according to
    /// `aggregation`; `None` for scalar reports.
    pub fn recomputed_overall(&self) -> Option<f64> {
        match &self.aggregation {
            Aggregation::FactorMean => self.per_factor.as_deref().map(mean),
            Aggregation::CodeMean => self.per_code.as_deref().map(mean),
            Aggregation::FactorWeighted(w) => {
                self.per_factor.as_deref().map(|v| weighted_mean(v, w))
            }
            Aggregation::CodeWeighted(w) => self.per_code.as_deref().map(|v| weighted_mean(v, w)),
            Aggregation::Scalar => None,
        }
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub(crate) fn weighted_mean(v: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        v.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / total
    } else {
        mean(v)
    }
}
