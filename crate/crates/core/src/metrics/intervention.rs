//! Intervention-based metrics: Z-diff, Z-min Variance, Z-max Variance and
//! IRS. A "fixed" factor always means a fixed bin after discretization.

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    rescale_by_chance, validate_pair, Aggregation, CodeMatrix, FactorMatrix, Matrix, MetricReport,
    Property,
};
use crate::discretize::{discretize_factors, BinnedColumn, DiscretizationConfig};
use crate::error::{Error, Result};
use crate::infotheory::InformationTable;
use crate::predictors::{LogisticModel, LogisticParams, MajorityVote};
use crate::rng::{derive_seed, seeded};

pub const Z_DIFF: &str = "z_diff";
pub const Z_MIN_VAR: &str = "z_min_var";
pub const Z_MAX_VAR: &str = "z_max_var";
pub const IRS: &str = "irs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionParams {
    /// Training plus evaluation points (batches for Z-diff, subsets otherwise).
    pub num_batches: usize,
    pub pairs_per_batch: usize,
    pub samples_per_subset: usize,
    /// The first `num_train_points` points train the classifier, the rest evaluate it.
    pub num_train_points: usize,
    pub binning: DiscretizationConfig,
    /// Classifier settings for Z-diff.
    pub logistic: LogisticParams,
    pub seed: u64,
}

impl InterventionParams {
    pub fn new(binning: DiscretizationConfig, seed: u64) -> Self {
        Self {
            num_batches: 5000,
            pairs_per_batch: 64,
            samples_per_subset: 64,
            num_train_points: 4000,
            binning,
            logistic: LogisticParams::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_batches == 0 || self.pairs_per_batch == 0 || self.samples_per_subset == 0 {
            return Err(Error::InvalidParameter(
                "batch, pair and subset counts must be positive".into(),
            ));
        }
        if self.num_train_points == 0 || self.num_train_points >= self.num_batches {
            return Err(Error::InvalidParameter(format!(
                "num_train_points ({}) must lie in 1..num_batches ({})",
                self.num_train_points, self.num_batches
            )));
        }
        self.binning.factors.validate()?;
        self.binning.codes.validate()
    }
}

/// Sample indices grouped by bin, per factor.
fn members(binned: &[BinnedColumn]) -> Vec<Vec<Vec<usize>>> {
    binned
        .iter()
        .map(|col| {
            let mut groups = vec![Vec::new(); col.num_bins];
            for (s, &b) in col.bins.iter().enumerate() {
                groups[b].push(s);
            }
            groups
        })
        .collect()
}

/// Codes divided by their full-dataset standard deviation. Constant
/// dimensions are returned separately and left out of every comparison.
fn normalized_columns(codes: &CodeMatrix) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut cols = Vec::with_capacity(codes.num_dims());
    let mut constant = Vec::new();
    for j in 0..codes.num_dims() {
        let c = codes.column(j);
        let n = c.len() as f64;
        let mu = c.iter().sum::<f64>() / n;
        let sd = (c.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n).sqrt();
        if sd > 0.0 {
            cols.push(c.iter().map(|v| v / sd).collect());
        } else {
            constant.push(j);
            cols.push(c);
        }
    }
    (cols, constant)
}

fn subset_variance(col: &[f64], subset: &[usize]) -> f64 {
    let n = subset.len() as f64;
    let mu = subset.iter().map(|&s| col[s]).sum::<f64>() / n;
    subset.iter().map(|&s| (col[s] - mu).powi(2)).sum::<f64>() / n
}

fn chance_report(metric: &str, votes: &[usize], labels: &[usize], m: usize, params: &InterventionParams) -> Result<MetricReport> {
    let t = params.num_train_points;
    let clf = MajorityVote::fit(&votes[..t], &labels[..t])?;
    let acc = clf.accuracy(&votes[t..], &labels[t..])?;
    let chance = 1.0 / m as f64;
    let score = if m == 1 { 1.0 } else { rescale_by_chance(acc, chance)? };
    Ok(MetricReport::scalar(metric, Property::Holistic, score, params.seed))
}

/// Classifies which factor was held fixed from batch means of absolute code
/// differences between sample pairs sharing that factor's bin.
pub fn z_diff(factors: &FactorMatrix, codes: &CodeMatrix, params: &InterventionParams) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    params.validate()?;
    let binned = discretize_factors(factors, &params.binning.factors)?;
    let groups = members(&binned);
    for (i, g) in groups.iter().enumerate() {
        if let Some((bin, s)) = g.iter().enumerate().find(|(_, s)| s.len() == 1) {
            return Err(Error::InsufficientPairs {
                factor: i,
                bin,
                count: s.len(),
            });
        }
    }
    let n = factors.num_samples();
    let m = factors.num_factors();
    let d = codes.num_dims();
    let z = codes.values();
    let mut rng = seeded(derive_seed(params.seed, 10));
    let mut feats = Vec::with_capacity(params.num_batches * d);
    let mut labels = Vec::with_capacity(params.num_batches);
    let mut acc = vec![0.0; d];
    for _ in 0..params.num_batches {
        let i = rng.gen_range(0..m);
        acc.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..params.pairs_per_batch {
            let a = rng.gen_range(0..n);
            let g = &groups[i][binned[i].bins[a]];
            let mut k = rng.gen_range(0..g.len() - 1);
            if g[k] == a {
                k = g.len() - 1;
            }
            let (ra, rb) = (z.row(a), z.row(g[k]));
            for j in 0..d {
                acc[j] += (ra[j] - rb[j]).abs();
            }
        }
        feats.extend(acc.iter().map(|v| v / params.pairs_per_batch as f64));
        labels.push(i);
    }
    let x = Matrix::new(params.num_batches, d, feats)?;
    let t = params.num_train_points;
    let train: Vec<usize> = (0..t).collect();
    let eval: Vec<usize> = (t..params.num_batches).collect();
    let ltr = &labels[..t];
    if m == 1 || ltr.iter().all(|&l| l == ltr[0]) {
        return Ok(MetricReport::scalar(Z_DIFF, Property::Holistic, 1.0, params.seed)
            .with_warning("only one factor was sampled; the classifier is trivially exact"));
    }
    let model = LogisticModel::fit_multinomial(&x.select_rows(&train), ltr, m, &params.logistic)?;
    let pred = model.predict(&x.select_rows(&eval))?;
    let hits = pred.iter().zip(&labels[t..]).filter(|(a, b)| a == b).count();
    let acc = hits as f64 / eval.len() as f64;
    let score = rescale_by_chance(acc, 1.0 / m as f64)?;
    Ok(MetricReport::scalar(Z_DIFF, Property::Holistic, score, params.seed))
}

/// Subsets share one factor's bin; the code dimension of least normalized
/// variance votes for that factor.
pub fn z_min_variance(
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    params: &InterventionParams,
) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    params.validate()?;
    let binned = discretize_factors(factors, &params.binning.factors)?;
    let groups = members(&binned);
    let need = params.samples_per_subset;
    for (i, g) in groups.iter().enumerate() {
        if let Some((bin, s)) = g.iter().enumerate().find(|(_, s)| !s.is_empty() && s.len() < need) {
            return Err(Error::InsufficientStratum {
                factor: i,
                bin,
                available: s.len(),
                required: need,
            });
        }
    }
    let (cols, constant) = normalized_columns(codes);
    let active: Vec<usize> = (0..codes.num_dims()).filter(|j| !constant.contains(j)).collect();
    if active.is_empty() {
        return Err(Error::InsufficientData("every code dimension is constant".into()));
    }
    let n = factors.num_samples();
    let m = factors.num_factors();
    let mut rng = seeded(derive_seed(params.seed, 20));
    let mut votes = Vec::with_capacity(params.num_batches);
    let mut labels = Vec::with_capacity(params.num_batches);
    for _ in 0..params.num_batches {
        let i = rng.gen_range(0..m);
        let anchor = rng.gen_range(0..n);
        let g = &groups[i][binned[i].bins[anchor]];
        let subset: Vec<usize> = index::sample(&mut rng, g.len(), need).iter().map(|k| g[k]).collect();
        let mut best = active[0];
        let mut best_var = f64::INFINITY;
        for &j in &active {
            let v = subset_variance(&cols[j], &subset);
            if v < best_var {
                best_var = v;
                best = j;
            }
        }
        votes.push(best);
        labels.push(i);
    }
    let mut rep = chance_report(Z_MIN_VAR, &votes, &labels, m, params)?;
    if !constant.is_empty() {
        rep = rep.with_warning(format!("constant code dimensions {constant:?} were excluded"));
    }
    Ok(rep)
}

/// Subsets share the bins of every factor but one; the code dimension of
/// largest normalized variance votes for the free factor. Strata smaller than
/// the subset size are sampled with replacement; the share of such strata,
/// and of single-sample ones, is reported as a warning.
pub fn z_max_variance(
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    params: &InterventionParams,
) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    params.validate()?;
    let binned = discretize_factors(factors, &params.binning.factors)?;
    let (cols, constant) = normalized_columns(codes);
    let active: Vec<usize> = (0..codes.num_dims()).filter(|j| !constant.contains(j)).collect();
    if active.is_empty() {
        return Err(Error::InsufficientData("every code dimension is constant".into()));
    }
    let n = factors.num_samples();
    let m = factors.num_factors();
    let key = |s: usize, free: usize| -> Vec<usize> {
        (0..m).filter(|&k| k != free).map(|k| binned[k].bins[s]).collect()
    };
    let strata: Vec<HashMap<Vec<usize>, Vec<usize>>> = (0..m)
        .map(|free| {
            let mut map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for s in 0..n {
                map.entry(key(s, free)).or_default().push(s);
            }
            map
        })
        .collect();

    let need = params.samples_per_subset;
    let mut rng = seeded(derive_seed(params.seed, 30));
    let mut votes = Vec::with_capacity(params.num_batches);
    let mut labels = Vec::with_capacity(params.num_batches);
    let mut degenerate = 0usize;
    let mut undersized = 0usize;
    for _ in 0..params.num_batches {
        let i = rng.gen_range(0..m);
        let anchor = rng.gen_range(0..n);
        let g = &strata[i][&key(anchor, i)];
        labels.push(i);
        // a lone anchor has zero variance everywhere, so the vote is biased
        // toward the first dimension; that bias is what sparse strata cost
        if g.len() < 2 {
            degenerate += 1;
        }
        let subset: Vec<usize> = if g.len() >= need {
            index::sample(&mut rng, g.len(), need).iter().map(|k| g[k]).collect()
        } else {
            undersized += 1;
            (0..need).map(|_| g[rng.gen_range(0..g.len())]).collect()
        };
        let mut best = active[0];
        let mut best_var = f64::NEG_INFINITY;
        for &j in &active {
            let v = subset_variance(&cols[j], &subset);
            if v > best_var {
                best_var = v;
                best = j;
            }
        }
        votes.push(best);
    }
    let mut rep = chance_report(Z_MAX_VAR, &votes, &labels, m, params)?;
    let total = params.num_batches as f64;
    if degenerate > 0 {
        rep = rep.with_warning(format!(
            "{:.4} of subsets came from strata with a single sample",
            degenerate as f64 / total
        ));
    }
    if undersized > 0 {
        rep = rep.with_warning(format!(
            "{:.4} of subsets were drawn with replacement from strata smaller than {need}",
            undersized as f64 / total
        ));
    }
    if !constant.is_empty() {
        rep = rep.with_warning(format!("constant code dimensions {constant:?} were excluded"));
    }
    Ok(rep)
}

/// Interventional Robustness Score. Each code dimension is attributed to the
/// factor it shares most information with; its robustness is one minus the
/// frequency-weighted mean, over that factor's bins, of the largest deviation
/// from the bin mean, relative to the largest deviation from the global mean.
/// The overall score weights dimensions by that global deviation.
pub fn irs(factors: &FactorMatrix, codes: &CodeMatrix, params: &InterventionParams) -> Result<MetricReport> {
    validate_pair(factors, codes)?;
    params.validate()?;
    let table = InformationTable::compute(factors, codes, &params.binning)?;
    let binned = discretize_factors(factors, &params.binning.factors)?;
    let groups = members(&binned);
    let n = factors.num_samples() as f64;
    let mut per_code = Vec::with_capacity(codes.num_dims());
    let mut weights = Vec::with_capacity(codes.num_dims());
    let mut attribution = Vec::with_capacity(codes.num_dims());
    for j in 0..codes.num_dims() {
        let z = codes.column(j);
        let mi = table.mi.weights().column(j);
        let (target, _, _) = super::top_two(&mi);
        attribution.push(target);
        let mu = z.iter().sum::<f64>() / n;
        let max_dev = z.iter().map(|v| (v - mu).abs()).fold(0.0, f64::max);
        if max_dev <= 0.0 {
            per_code.push(0.0);
            weights.push(0.0);
            continue;
        }
        let mut cum = 0.0;
        for g in groups[target].iter().filter(|g| !g.is_empty()) {
            let k = g.len() as f64;
            let e = g.iter().map(|&s| z[s]).sum::<f64>() / k;
            let dev = g.iter().map(|&s| (z[s] - e).abs()).fold(0.0, f64::max);
            cum += dev * k / n;
        }
        per_code.push((1.0 - cum / max_dev).clamp(0.0, 1.0));
        weights.push(max_dev);
    }
    let mut rep = MetricReport::scalar(IRS, Property::Modularity, 0.0, params.seed);
    rep.overall = crate::data::weighted_mean(&per_code, &weights);
    rep.per_code = Some(per_code);
    rep.aggregation = Aggregation::CodeWeighted(weights);
    Ok(rep.with_warning(format!("code-to-factor attribution by MI argmax: {attribution:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::BinningSpec;

    fn identity(n: usize, m: usize, seed: u64) -> (FactorMatrix, CodeMatrix) {
        let mut rng = seeded(seed);
        let v = Matrix::new(n, m, (0..n * m).map(|_| rng.gen()).collect()).unwrap();
        (
            FactorMatrix::continuous(v.clone()).unwrap(),
            CodeMatrix::unnamed(v).unwrap(),
        )
    }

    fn params(seed: u64) -> InterventionParams {
        let binning = DiscretizationConfig {
            factors: BinningSpec::fixed(10, 0.0, 1.0),
            codes: BinningSpec::empirical(10),
        };
        InterventionParams {
            num_batches: 600,
            num_train_points: 400,
            ..InterventionParams::new(binning, seed)
        }
    }

    #[test]
    fn starved_bin_is_named() {
        let f = FactorMatrix::continuous(Matrix::from_columns(&[vec![0.05, 0.06, 0.95]]).unwrap()).unwrap();
        let c = CodeMatrix::unnamed(Matrix::from_columns(&[vec![1.0, 2.0, 3.0]]).unwrap()).unwrap();
        assert_eq!(
            z_diff(&f, &c, &params(0)).unwrap_err(),
            Error::InsufficientPairs {
                factor: 0,
                bin: 9,
                count: 1
            }
        );
        assert!(matches!(
            z_min_variance(&f, &c, &params(0)).unwrap_err(),
            Error::InsufficientStratum { factor: 0, bin: 0, available: 2, required: 64 }
        ));
    }

    #[test]
    fn identity_scores() {
        let (f, c) = identity(4000, 4, 1);
        assert!(z_diff(&f, &c, &params(1)).unwrap().overall > 0.95);
        assert!(z_min_variance(&f, &c, &params(1)).unwrap().overall > 0.95);
        let r = irs(&f, &c, &params(1)).unwrap();
        assert!(r.overall < 1.0 && r.overall > 0.8, "{}", r.overall);
        assert!((r.recomputed_overall().unwrap() - r.overall).abs() < 1e-12);
    }

    #[test]
    fn bad_params() {
        let (f, c) = identity(500, 2, 0);
        let mut p = params(0);
        p.num_train_points = p.num_batches;
        assert!(z_diff(&f, &c, &p).is_err());
    }

    #[test]
    fn z_max_flags_single_sample_strata() {
        let (f, c) = identity(500, 6, 2);
        let r = z_max_variance(&f, &c, &params(2)).unwrap();
        assert!(r.overall < 1.0);
        assert!(r.warnings.iter().any(|w| w.contains("single sample")));
    }
}
