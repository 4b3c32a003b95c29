//! Self-contained regressors and classifiers used by the predictor-based and
//! intervention-based metrics.

pub mod auc;
pub mod cv;
pub mod lasso;
pub mod logistic;
pub mod tree;

pub use auc::roc_auc;
pub use cv::{cross_validate, fold_assignment, CvOutcome, Objective};
pub use lasso::{fit_lasso, LassoModel, LassoParams};
pub use logistic::{LogisticKind, LogisticModel, LogisticParams};
pub use tree::{DecisionTree, FeatureSubset, ForestParams, RandomForest, TreeParams, TreeTask};

use crate::error::{Error, Result};

pub fn mse(yhat: &[f64], y: &[f64]) -> Result<f64> {
    if yhat.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "mse inputs",
            expected: y.len(),
            found: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(yhat.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64)
}

/// Coefficient of determination of the least-squares line `y ≈ a·x + b`,
/// i.e. the squared Pearson correlation. Zero when either side is constant.
pub fn r_squared_linear(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "r_squared inputs",
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Ok(0.0);
    }
    Ok((sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            what: "balanced_accuracy inputs",
            expected: truth.len(),
            found: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = truth.iter().copied().max().unwrap_or(0) + 1;
    let mut hits = vec![0usize; k];
    let mut totals = vec![0usize; k];
    for (&p, &t) in pred.iter().zip(truth) {
        totals[t] += 1;
        if p == t {
            hits[t] += 1;
        }
    }
    let present: Vec<f64> = (0..k)
        .filter(|&c| totals[c] > 0)
        .map(|c| hits[c] as f64 / totals[c] as f64)
        .collect();
    Ok(present.iter().sum::<f64>() / present.len() as f64)
}

/// Majority-vote lookup from a discrete feature to a label. Unseen feature
/// values and ties resolve to the lowest label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityVote {
    table: Vec<usize>,
}

impl MajorityVote {
    pub fn fit(features: &[usize], labels: &[usize]) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                what: "majority vote labels",
                expected: features.len(),
                found: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::EmptyInput);
        }
        let nf = features.iter().copied().max().unwrap_or(0) + 1;
        let nl = labels.iter().copied().max().unwrap_or(0) + 1;
        let mut counts = vec![0usize; nf * nl];
        for (&f, &l) in features.iter().zip(labels) {
            counts[f * nl + l] += 1;
        }
        let table = (0..nf)
            .map(|f| {
                let row = &counts[f * nl..(f + 1) * nl];
                let mut best = 0;
                for (l, &c) in row.iter().enumerate() {
                    if c > row[best] {
                        best = l;
                    }
                }
                best
            })
            .collect();
        Ok(Self { table })
    }

    pub fn predict(&self, feature: usize) -> usize {
        self.table.get(feature).copied().unwrap_or(0)
    }

    pub fn accuracy(&self, features: &[usize], labels: &[usize]) -> Result<f64> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                what: "majority vote labels",
                expected: features.len(),
                found: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::EmptyInput);
        }
        let hits = features
            .iter()
            .zip(labels)
            .filter(|(&f, &l)| self.predict(f) == l)
            .count();
        Ok(hits as f64 / features.len() as f64)
    }
}
