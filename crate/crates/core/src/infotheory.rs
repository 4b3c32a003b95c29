//! Plug-in (maximum-likelihood) entropy and mutual information over
//! discretized variables. Natural logarithms throughout.

use crate::data::{CodeMatrix, FactorMatrix, ImportanceMatrix, ImportanceSource, Matrix};
use crate::discretize::{discretize_codes, discretize_factors, BinnedColumn, DiscretizationConfig};
use crate::error::{Error, Result};

/// Contingency table of two discretized variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    rows: usize,
    cols: usize,
    counts: Vec<usize>,
    total: usize,
}

impl JointHistogram {
    pub fn new(rows: usize, cols: usize, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "histogram cells",
                expected: rows * cols,
                found: counts.len(),
            });
        }
        let total = counts.iter().sum();
        Ok(Self {
            rows,
            cols,
            counts,
            total,
        })
    }

    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let cols = table.first().map_or(0, Vec::len);
        let mut counts = Vec::with_capacity(table.len() * cols);
        for row in table {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "histogram row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            counts.extend_from_slice(row);
        }
        Self::new(table.len(), cols, counts)
    }

    /// Counts co-occurrences of two bin-index sequences.
    pub fn from_bins(a: &[usize], a_bins: usize, b: &[usize], b_bins: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                what: "paired sample count",
                expected: a.len(),
                found: b.len(),
            });
        }
        let mut counts = vec![0usize; a_bins * b_bins];
        for (&i, &j) in a.iter().zip(b) {
            if i >= a_bins {
                return Err(Error::BinOutOfRange {
                    index: i,
                    num_bins: a_bins,
                });
            }
            if j >= b_bins {
                return Err(Error::BinOutOfRange {
                    index: j,
                    num_bins: b_bins,
                });
            }
            counts[i * b_bins + j] += 1;
        }
        Ok(Self {
            rows: a_bins,
            cols: b_bins,
            counts,
            total: a.len(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.counts[i * self.cols + j]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn row_marginal(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| self.counts[i * self.cols..(i + 1) * self.cols].iter().sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<usize> {
        let mut m = vec![0usize; self.cols];
        for i in 0..self.rows {
            for (j, acc) in m.iter_mut().enumerate() {
                *acc += self.get(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.counts.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                counts[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            counts,
            total: self.total,
        }
    }
}

/// Shannon entropy (nats) of a population vector; empty bins contribute 0.
pub fn entropy(pop: &[usize]) -> Result<f64> {
    let total: usize = pop.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = total as f64;
    Ok(pop
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum())
}

pub fn joint_entropy(hist: &JointHistogram) -> Result<f64> {
    entropy(&hist.counts)
}

pub fn mutual_information(hist: &JointHistogram) -> Result<f64> {
    if hist.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = hist.total as f64;
    let rm = hist.row_marginal();
    let cm = hist.col_marginal();
    let mut mi = 0.0;
    for i in 0..hist.rows {
        if rm[i] == 0 {
            continue;
        }
        for j in 0..hist.cols {
            let c = hist.get(i, j);
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            mi += p * (c as f64 * n / (rm[i] as f64 * cm[j] as f64)).ln();
        }
    }
    Ok(mi.max(0.0))
}

/// M×d matrix of I(v_i, z_j) over the discretized pair.
pub fn pairwise_mi_matrix(
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    config: &DiscretizationConfig,
) -> Result<ImportanceMatrix> {
    Ok(InformationTable::compute(factors, codes, config)?.mi)
}

/// Everything the information-based metrics read, estimated once per
/// (data, binning) so all of them see identical numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationTable {
    pub mi: ImportanceMatrix,
    /// H(v_i) of the binned factors.
    pub factor_entropies: Vec<f64>,
    /// H(v_i, z_j), M×d.
    pub joint_entropies: Matrix,
    pub num_code_bins: usize,
}

impl InformationTable {
    pub fn compute(
        factors: &FactorMatrix,
        codes: &CodeMatrix,
        config: &DiscretizationConfig,
    ) -> Result<Self> {
        crate::data::validate_pair(factors, codes)?;
        let fb = discretize_factors(factors, &config.factors)?;
        let cb = discretize_codes(codes, &config.codes)?;
        Self::from_binned(&fb, &cb, config.codes.num_bins)
    }

    pub fn from_binned(
        factor_bins: &[BinnedColumn],
        code_bins: &[BinnedColumn],
        num_code_bins: usize,
    ) -> Result<Self> {
        let m = factor_bins.len();
        let d = code_bins.len();
        let mut mi = Matrix::zeros(m, d);
        let mut joint = Matrix::zeros(m, d);
        let mut factor_entropies = Vec::with_capacity(m);
        for (i, f) in factor_bins.iter().enumerate() {
            let pop = crate::discretize::bin_populations(&f.bins, f.num_bins)?;
            factor_entropies.push(entropy(&pop)?);
            for (j, c) in code_bins.iter().enumerate() {
                let h = JointHistogram::from_bins(&f.bins, f.num_bins, &c.bins, c.num_bins)?;
                mi.set(i, j, mutual_information(&h)?);
                joint.set(i, j, joint_entropy(&h)?);
            }
        }
        Ok(Self {
            mi: ImportanceMatrix::new(mi, ImportanceSource::MutualInformation)?,
            factor_entropies,
            joint_entropies: joint,
            num_code_bins,
        })
    }
}
