//! Equal-width binning of factor and code columns.

use serde::{Deserialize, Serialize};

use crate::data::{CodeMatrix, FactorKind, FactorMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningStrategy {
    /// Bounds taken from the observed min/max of each column.
    EqualWidthEmpirical,
    /// Bounds fixed ahead of time; values outside are clamped to the end bins.
    EqualWidthFixed { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub num_bins: usize,
    pub strategy: BinningStrategy,
}

impl BinningSpec {
    pub fn empirical(num_bins: usize) -> Self {
        Self {
            num_bins,
            strategy: BinningStrategy::EqualWidthEmpirical,
        }
    }

    pub fn fixed(num_bins: usize, lo: f64, hi: f64) -> Self {
        Self {
            num_bins,
            strategy: BinningStrategy::EqualWidthFixed { lo, hi },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_bins < 2 {
            return Err(Error::InvalidParameter(format!(
                "equal-width binning needs at least 2 bins, got {}",
                self.num_bins
            )));
        }
        if let BinningStrategy::EqualWidthFixed { lo, hi } = self.strategy {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter(format!(
                    "fixed bin bounds must satisfy lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

impl Default for BinningSpec {
    fn default() -> Self {
        Self::empirical(10)
    }
}

/// Binning used for factors and for codes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub factors: BinningSpec,
    pub codes: BinningSpec,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            factors: BinningSpec::empirical(10),
            codes: BinningSpec::empirical(10),
        }
    }
}

/// One discretized column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinnedColumn {
    pub bins: Vec<usize>,
    pub num_bins: usize,
}

pub fn discretize_column(x: &[f64], spec: &BinningSpec) -> Result<Vec<usize>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    spec.validate()?;
    if let Some(row) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            matrix: "column",
            row,
            col: 0,
        });
    }
    let (lo, hi) = match spec.strategy {
        BinningStrategy::EqualWidthFixed { lo, hi } => (lo, hi),
        BinningStrategy::EqualWidthEmpirical => {
            let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                return Ok(vec![0; x.len()]);
            }
            (lo, hi)
        }
    };
    let last = spec.num_bins - 1;
    let scale = spec.num_bins as f64 / (hi - lo);
    Ok(x.iter()
        .map(|&v| {
            let b = ((v - lo) * scale).floor();
            if b <= 0.0 {
                0
            } else {
                (b as usize).min(last)
            }
        })
        .collect())
}

pub fn bin_populations(indices: &[usize], num_bins: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; num_bins];
    for &i in indices {
        if i >= num_bins {
            return Err(Error::BinOutOfRange {
                index: i,
                num_bins,
            });
        }
        counts[i] += 1;
    }
    Ok(counts)
}

/// Bins every factor column; categorical factors keep their class index as bin.
pub fn discretize_factors(factors: &FactorMatrix, spec: &BinningSpec) -> Result<Vec<BinnedColumn>> {
    (0..factors.num_factors())
        .map(|i| {
            let col = factors.column(i);
            match factors.kinds()[i] {
                FactorKind::Categorical => {
                    let bins: Vec<usize> = col.iter().map(|&v| v as usize).collect();
                    let num_bins = bins.iter().copied().max().unwrap_or(0) + 1;
                    Ok(BinnedColumn { bins, num_bins })
                }
                FactorKind::Continuous => Ok(BinnedColumn {
                    bins: discretize_column(&col, spec)?,
                    num_bins: spec.num_bins,
                }),
            }
        })
        .collect()
}

pub fn discretize_codes(codes: &CodeMatrix, spec: &BinningSpec) -> Result<Vec<BinnedColumn>> {
    (0..codes.num_dims())
        .map(|j| {
            Ok(BinnedColumn {
                bins: discretize_column(&codes.column(j), spec)?,
                num_bins: spec.num_bins,
            })
        })
        .collect()
}
