//! Predictor-based metrics: DCI (lasso or random-forest backend), the
//! Explicitness Score and SAP.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{
    validate_pair, Aggregation, CodeMatrix, FactorKind, FactorMatrix, ImportanceMatrix,
    ImportanceSource, Matrix, MetricReport, Property,
};
use crate::discretize::{discretize_factors, BinningSpec};
use crate::error::{Error, Result};
use crate::predictors::{
    balanced_accuracy, cross_validate, fit_lasso, mse, r_squared_linear, roc_auc, DecisionTree,
    FeatureSubset, ForestParams, LassoParams, LogisticKind, LogisticModel, LogisticParams, Objective,
    RandomForest, TreeParams, TreeTask,
};
use crate::rng::{derive_seed, seeded};

use super::top_two;

pub const DCI_LASSO: &str = "dci_lasso";
pub const DCI_RF: &str = "dci_rf";
pub const EXPLICITNESS_SCORE: &str = "explicitness_score";
pub const SAP: &str = "sap";

/// Deterministic train/test split; the test part holds `round(frac·N)` rows.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) || test_fraction == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n_test = ((n as f64) * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::InsufficientData(format!(
            "{n} samples cannot be split with test fraction {test_fraction}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeded(seed));
    let test = idx[..n_test].to_vec();
    let train = idx[n_test..].to_vec();
    Ok((train, test))
}

fn standardize_columns(x: &Matrix) -> Matrix {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for j in 0..x.ncols() {
        let c = x.column(j);
        let mu = c.iter().sum::<f64>() / n;
        let sd = (c.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n).sqrt();
        let sd = if sd > 0.0 { sd } else { 1.0 };
        for r in 0..x.nrows() {
            out.set(r, j, (x.get(r, j) - mu) / sd);
        }
    }
    out
}

fn min_max(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        v.iter().map(|x| (x - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; v.len()]
    }
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Entropy of the normalized vector in base `base`.
fn entropy_base(p: &[f64], base: usize) -> f64 {
    let total: f64 = p.iter().sum();
    if total <= 0.0 || base < 2 {
        return 0.0;
    }
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let q = v / total;
            q * q.ln()
        })
        .sum::<f64>()
        / (base as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DciBackend {
    Lasso,
    RandomForest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DciParams {
    pub backend: DciBackend,
    pub test_fraction: f64,
    pub cv_folds: usize,
    pub lasso_grid: Vec<f64>,
    pub lasso: LassoParams,
    /// `None` stands for unbounded depth.
    pub depth_grid: Vec<Option<usize>>,
    pub forest: ForestParams,
    /// Explicitness is `1 − k·MSE` on targets scaled to `[0, 1]`.
    pub mse_scale: f64,
    pub seed: u64,
}

impl DciParams {
    pub fn lasso(seed: u64) -> Self {
        Self {
            backend: DciBackend::Lasso,
            ..Self::random_forest(seed)
        }
    }

    pub fn random_forest(seed: u64) -> Self {
        Self {
            backend: DciBackend::RandomForest,
            test_fraction: 0.3,
            cv_folds: 3,
            lasso_grid: vec![1e-4, 1e-3, 1e-2, 1e-1],
            lasso: LassoParams::default(),
            depth_grid: vec![Some(2), Some(4), Some(8), None],
            forest: ForestParams {
                num_trees: 10,
                tree: TreeParams {
                    max_depth: None,
                    min_leaf: 5,
                    features_per_split: FeatureSubset::All,
                },
                bootstrap: true,
                seed,
            },
            mse_scale: 12.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DciReport {
    pub backend: DciBackend,
    pub modularity: f64,
    pub compactness: f64,
    pub explicitness: f64,
    pub importance: ImportanceMatrix,
    /// D_j per code.
    pub per_code_modularity: Vec<f64>,
    /// ρ_j per code.
    pub code_weights: Vec<f64>,
    /// C_i per factor.
    pub per_factor_compactness: Vec<f64>,
    pub per_factor_explicitness: Vec<f64>,
    /// Hyper-parameter picked per factor (λ or depth, as text).
    pub selected: Vec<String>,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl DciReport {
    fn prefix(&self) -> &'static str {
        match self.backend {
            DciBackend::Lasso => DCI_LASSO,
            DciBackend::RandomForest => DCI_RF,
        }
    }

    /// The three scores as individual reports named `<backend>_<part>`.
    pub fn to_reports(&self) -> Vec<MetricReport> {
        let p = self.prefix();
        let mut modularity = MetricReport::scalar(
            &format!("{p}_modularity"),
            Property::Modularity,
            self.modularity,
            self.seed,
        );
        modularity.per_code = Some(self.per_code_modularity.clone());
        modularity.aggregation = Aggregation::CodeWeighted(self.code_weights.clone());
        let mut compactness = MetricReport::from_factors(
            &format!("{p}_compactness"),
            Property::Compactness,
            self.per_factor_compactness.clone(),
            self.seed,
        );
        compactness.overall = self.compactness;
        let explicitness = MetricReport::from_factors(
            &format!("{p}_explicitness"),
            Property::Explicitness,
            self.per_factor_explicitness.clone(),
            self.seed,
        );
        let mut out = vec![modularity, compactness, explicitness];
        for r in &mut out {
            r.warnings = self.warnings.clone();
        }
        out
    }
}

/// Modularity, per-code D_j, code weights ρ_j, compactness and per-factor
/// C_i from an importance matrix. Zero rows get C_i = 0 and are listed.
pub fn dci_scores(r: &ImportanceMatrix) -> (f64, Vec<f64>, Vec<f64>, f64, Vec<f64>, Vec<usize>) {
    let m = r.num_factors();
    let d = r.num_codes();
    let w = r.weights();
    let mut c = Vec::with_capacity(m);
    let mut zero_rows = Vec::new();
    for i in 0..m {
        let row = w.row(i);
        if row.iter().sum::<f64>() <= 0.0 {
            zero_rows.push(i);
            c.push(0.0);
        } else if d == 1 {
            c.push(1.0);
        } else {
            c.push((1.0 - entropy_base(row, d)).clamp(0.0, 1.0));
        }
    }
    let total: f64 = w.as_slice().iter().sum();
    let mut dj = Vec::with_capacity(d);
    let mut rho = Vec::with_capacity(d);
    for j in 0..d {
        let col = w.column(j);
        let s: f64 = col.iter().sum();
        rho.push(if total > 0.0 { s / total } else { 0.0 });
        if s <= 0.0 {
            dj.push(0.0);
        } else if m == 1 {
            dj.push(1.0);
        } else {
            dj.push((1.0 - entropy_base(&col, m)).clamp(0.0, 1.0));
        }
    }
    let modularity = dj.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>();
    let compactness = crate::data::mean(&c);
    (modularity, dj, rho, compactness, c, zero_rows)
}

struct FactorFit {
    importance: Vec<f64>,
    test_pred: Vec<f64>,
    selected: String,
}

fn fit_lasso_factor(
    z: &Matrix,
    y: &[f64],
    train: &[usize],
    test: &[usize],
    params: &DciParams,
    seed: u64,
) -> Result<FactorFit> {
    // target standardized with training statistics
    let ytr = pick(y, train);
    let n = ytr.len() as f64;
    let mu = ytr.iter().sum::<f64>() / n;
    let sd = (ytr.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    let ys: Vec<f64> = y.iter().map(|v| (v - mu) / sd).collect();
    let ztr = z.select_rows(train);
    let ys_tr = pick(&ys, train);

    let cv = cross_validate(
        train.len(),
        params.cv_folds,
        seed,
        &params.lasso_grid,
        Objective::Minimize,
        |&lambda, tr, te| {
            let lp = LassoParams {
                lambda,
                ..params.lasso
            };
            let m = fit_lasso(&ztr.select_rows(tr), &pick(&ys_tr, tr), &lp)?;
            // a λ that removes every weight cannot rank code dimensions
            if m.fitted_weights.iter().all(|&w| w == 0.0) {
                return Ok(f64::NAN);
            }
            mse(&m.predict(&ztr.select_rows(te))?, &pick(&ys_tr, te))
        },
    )?;
    let lp = LassoParams {
        lambda: cv.best,
        ..params.lasso
    };
    let model = fit_lasso(&ztr, &ys_tr, &lp)?;
    let pred = model.predict(&z.select_rows(test))?;
    Ok(FactorFit {
        importance: model.fitted_weights.iter().map(|w| w.abs()).collect(),
        test_pred: pred.iter().map(|p| p * sd + mu).collect(),
        selected: format!("lambda={}", cv.best),
    })
}

fn fit_forest_factor(
    z: &Matrix,
    y: &[f64],
    train: &[usize],
    test: &[usize],
    params: &DciParams,
    seed: u64,
) -> Result<FactorFit> {
    let ztr = z.select_rows(train);
    let ytr = pick(y, train);
    let forest_for = |depth: Option<usize>, s: u64| ForestParams {
        tree: TreeParams {
            max_depth: depth,
            ..params.forest.tree
        },
        seed: s,
        ..params.forest
    };
    // Trees cut at a depth equal trees grown to it, so each fold grows one
    // unbounded forest and every depth in the grid is scored by truncation.
    let mut grown: HashMap<(usize, usize), RandomForest> = HashMap::new();
    let cv = cross_validate(
        train.len(),
        params.cv_folds,
        seed,
        &params.depth_grid,
        Objective::Minimize,
        |&depth, tr, te| {
            let key = (te.len(), te[0]);
            if !grown.contains_key(&key) {
                let f = RandomForest::fit(
                    &ztr.select_rows(tr),
                    &pick(&ytr, tr),
                    TreeTask::Regression,
                    &forest_for(None, derive_seed(seed, 1)),
                )?;
                grown.insert(key, f);
            }
            let f = grown[&key].truncated(depth);
            mse(&f.predict(&ztr.select_rows(te))?, &pick(&ytr, te))
        },
    )?;
    let forest = RandomForest::fit(&ztr, &ytr, TreeTask::Regression, &forest_for(None, derive_seed(seed, 2)))?
        .truncated(cv.best);
    Ok(FactorFit {
        importance: forest.importances().to_vec(),
        test_pred: forest.predict(&z.select_rows(test))?,
        selected: match cv.best {
            Some(d) => format!("depth={d}"),
            None => "depth=unbounded".into(),
        },
    })
}

/// Disentanglement (modularity), completeness (compactness) and
/// informativeness (explicitness) from one regressor per factor.
pub fn dci(factors: &FactorMatrix, codes: &CodeMatrix, params: &DciParams) -> Result<DciReport> {
    validate_pair(factors, codes)?;
    let n = factors.num_samples();
    let m = factors.num_factors();
    let d = codes.num_dims();
    let (train, test) = train_test_split(n, params.test_fraction, derive_seed(params.seed, 0))?;
    let z = standardize_columns(codes.values());

    let mut weights = Matrix::zeros(m, d);
    let mut expl = Vec::with_capacity(m);
    let mut selected = Vec::with_capacity(m);
    let mut warnings = Vec::new();
    for i in 0..m {
        let y = min_max(&factors.column(i));
        let seed = derive_seed(params.seed, 100 + i as u64);
        let fit = match params.backend {
            DciBackend::Lasso => fit_lasso_factor(&z, &y, &train, &test, params, seed)?,
            DciBackend::RandomForest => fit_forest_factor(&z, &y, &train, &test, params, seed)?,
        };
        for (j, &w) in fit.importance.iter().enumerate() {
            weights.set(i, j, w);
        }
        let err = mse(&fit.test_pred, &pick(&y, &test))?;
        expl.push((1.0 - params.mse_scale * err).clamp(0.0, 1.0));
        selected.push(fit.selected);
    }
    let source = match params.backend {
        DciBackend::Lasso => ImportanceSource::Lasso,
        DciBackend::RandomForest => ImportanceSource::RandomForest,
    };
    let importance = ImportanceMatrix::new(weights, source)?;
    let (modularity, dj, rho, compactness, c, zero_rows) = dci_scores(&importance);
    if !zero_rows.is_empty() {
        warnings.push(format!(
            "factors {zero_rows:?} have all-zero importance; their compactness is set to 0"
        ));
    }
    Ok(DciReport {
        backend: params.backend,
        modularity,
        compactness,
        explicitness: crate::data::mean(&expl),
        importance,
        per_code_modularity: dj,
        code_weights: rho,
        per_factor_compactness: c,
        per_factor_explicitness: expl,
        selected,
        seed: params.seed,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitnessParams {
    pub test_fraction: f64,
    pub logistic: LogisticParams,
    pub classifier: LogisticKind,
    /// Binning applied to continuous factors to form classes.
    pub factor_bins: BinningSpec,
    pub seed: u64,
}

impl ExplicitnessParams {
    pub fn new(factor_bins: BinningSpec, seed: u64) -> Self {
        Self {
            test_fraction: 0.3,
            logistic: LogisticParams::default(),
            classifier: LogisticKind::Multinomial,
            factor_bins,
            seed,
        }
    }
}

/// Mean one-vs-rest ROC AUC of logistic classifiers on the full code, one
/// per factor class, rescaled from `[0.5, 1]` to `[0, 1]`.
pub fn explicitness_score(
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    params: &ExplicitnessParams,
) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    let binned = discretize_factors(factors, &params.factor_bins)?;
    let (train, test) = train_test_split(
        factors.num_samples(),
        params.test_fraction,
        derive_seed(params.seed, 0),
    )?;
    let z = codes.values();
    let ztr = z.select_rows(&train);
    let zte = z.select_rows(&test);
    let mut per_factor = Vec::with_capacity(binned.len());
    let mut skipped = Vec::new();
    for (i, col) in binned.iter().enumerate() {
        let labels = &col.bins;
        let first = labels[0];
        if labels.iter().all(|&l| l == first) {
            return Err(Error::SingleClass("explicitness factor classes"));
        }
        let ltr: Vec<usize> = train.iter().map(|&r| labels[r]).collect();
        let lte: Vec<usize> = test.iter().map(|&r| labels[r]).collect();
        let model = match params.classifier {
            LogisticKind::OneVsRest => LogisticModel::fit_ovr(&ztr, &ltr, col.num_bins, &params.logistic)?,
            LogisticKind::Multinomial => {
                LogisticModel::fit_multinomial(&ztr, &ltr, col.num_bins, &params.logistic)?
            }
        };
        let proba = model.predict_proba(&zte)?;
        let mut aucs = Vec::new();
        for k in 0..col.num_bins {
            let truth: Vec<bool> = lte.iter().map(|&l| l == k).collect();
            let pos = truth.iter().filter(|&&t| t).count();
            if pos == 0 || pos == truth.len() {
                if labels.contains(&k) {
                    skipped.push((i, k));
                }
                continue;
            }
            aucs.push(roc_auc(&proba.column(k), &truth)?);
        }
        if aucs.is_empty() {
            return Err(Error::SingleClass("explicitness held-out classes"));
        }
        let auc = aucs.iter().sum::<f64>() / aucs.len() as f64;
        per_factor.push(((auc - 0.5) / 0.5).clamp(0.0, 1.0));
    }
    let mut rep = MetricReport::from_factors(EXPLICITNESS_SCORE, Property::Explicitness, per_factor, params.seed);
    if !skipped.is_empty() {
        rep = rep.with_warning(format!(
            "(factor, class) pairs {skipped:?} lack held-out positives or negatives and were skipped"
        ));
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SapParams {
    pub dead_code_threshold: f64,
    /// Depths tried for the categorical-factor classifier.
    pub depth_grid: Vec<usize>,
    pub cv_folds: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SapParams {
    pub fn new(seed: u64) -> Self {
        Self {
            dead_code_threshold: 1e-6,
            depth_grid: vec![2, 4, 8],
            cv_folds: 3,
            test_fraction: 0.3,
            seed,
        }
    }
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n
}

fn tree_balanced_accuracy(
    z: &[f64],
    labels: &[usize],
    num_classes: usize,
    params: &SapParams,
    seed: u64,
) -> Result<f64> {
    let n = z.len();
    let x = Matrix::new(n, 1, z.to_vec())?;
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let task = TreeTask::Classification { num_classes };
    let (train, test) = train_test_split(n, params.test_fraction, seed)?;
    let xtr = x.select_rows(&train);
    let ytr = pick(&y, &train);
    let fit = |xs: &Matrix, ys: &[f64], depth: usize| {
        DecisionTree::fit(
            xs,
            ys,
            task,
            &TreeParams {
                max_depth: Some(depth),
                min_leaf: 1,
                features_per_split: FeatureSubset::All,
            },
            seed,
        )
    };
    let score = |t: &DecisionTree, xs: &Matrix, ys: &[f64]| -> Result<f64> {
        let pred: Vec<usize> = t.predict(xs)?.iter().map(|&p| p as usize).collect();
        let truth: Vec<usize> = ys.iter().map(|&v| v as usize).collect();
        balanced_accuracy(&pred, &truth)
    };
    let cv = cross_validate(
        train.len(),
        params.cv_folds,
        seed,
        &params.depth_grid,
        Objective::Maximize,
        |&depth, tr, te| {
            let t = fit(&xtr.select_rows(tr), &pick(&ytr, tr), depth)?;
            score(&t, &xtr.select_rows(te), &pick(&ytr, te))
        },
    )?;
    let t = fit(&xtr, &ytr, cv.best)?;
    score(&t, &x.select_rows(&test), &pick(&y, &test))
}

/// Separated Attribute Predictability: per factor, the gap between the two
/// most predictive single code dimensions.
pub fn sap(factors: &FactorMatrix, codes: &CodeMatrix, params: &SapParams) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    let d = codes.num_dims();
    let columns: Vec<Vec<f64>> = (0..d).map(|j| codes.column(j)).collect();
    let dead: Vec<usize> = (0..d)
        .filter(|&j| variance(&columns[j]) < params.dead_code_threshold)
        .collect();
    let mut per_factor = Vec::with_capacity(factors.num_factors());
    for i in 0..factors.num_factors() {
        let v = factors.column(i);
        let mut s = vec![0.0; d];
        for j in 0..d {
            if dead.contains(&j) {
                continue;
            }
            s[j] = match factors.kinds()[i] {
                FactorKind::Continuous => r_squared_linear(&columns[j], &v)?,
                FactorKind::Categorical => {
                    let labels: Vec<usize> = v.iter().map(|&x| x as usize).collect();
                    let k = labels.iter().copied().max().unwrap_or(0) + 1;
                    tree_balanced_accuracy(
                        &columns[j],
                        &labels,
                        k,
                        params,
                        derive_seed(params.seed, (i * d + j) as u64),
                    )?
                }
            };
        }
        let (_, best, second) = top_two(&s);
        per_factor.push((best - second).max(0.0));
    }
    let mut rep = MetricReport::from_factors(SAP, Property::Compactness, per_factor, params.seed);
    if !dead.is_empty() {
        rep = rep.with_warning(format!(
            "codes {dead:?} fall below the dead-code variance threshold and score 0"
        ));
    }
    Ok(rep)
}
