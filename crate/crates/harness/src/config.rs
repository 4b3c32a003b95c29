//! Run configuration. Every hyper-parameter a metric exposes is surfaced here
//! and echoed into the report so scores can be audited later.

use std::path::Path;

use disentangle_core::discretize::{BinningSpec, DiscretizationConfig};
use disentangle_core::metrics::intervention::InterventionParams;
use disentangle_core::metrics::predictor::{DciParams, ExplicitnessParams, SapParams};
use disentangle_core::predictors::{LogisticKind, LogisticParams};
use serde::{Deserialize, Serialize};

use crate::error::{InputError, InputResult};
use crate::registry::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterventionSettings {
    pub num_batches: usize,
    pub pairs_per_batch: usize,
    pub samples_per_subset: usize,
    pub num_train_points: usize,
    pub logistic: LogisticParams,
}

impl Default for InterventionSettings {
    fn default() -> Self {
        let p = InterventionParams::new(DiscretizationConfig::default(), 0);
        Self {
            num_batches: p.num_batches,
            pairs_per_batch: p.pairs_per_batch,
            samples_per_subset: p.samples_per_subset,
            num_train_points: p.num_train_points,
            logistic: p.logistic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DciSettings {
    pub test_fraction: f64,
    pub cv_folds: usize,
    pub lasso_grid: Vec<f64>,
    pub lasso_tol: f64,
    pub lasso_max_sweeps: usize,
    /// `null` means unbounded depth.
    pub depth_grid: Vec<Option<usize>>,
    pub num_trees: usize,
    pub min_leaf: usize,
    pub mse_scale: f64,
}

impl Default for DciSettings {
    fn default() -> Self {
        let p = DciParams::random_forest(0);
        Self {
            test_fraction: p.test_fraction,
            cv_folds: p.cv_folds,
            lasso_grid: p.lasso_grid,
            lasso_tol: p.lasso.tol,
            lasso_max_sweeps: p.lasso.max_sweeps,
            depth_grid: p.depth_grid,
            num_trees: p.forest.num_trees,
            min_leaf: p.forest.tree.min_leaf,
            mse_scale: p.mse_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplicitnessSettings {
    pub test_fraction: f64,
    pub classifier: LogisticKind,
    pub logistic: LogisticParams,
}

impl Default for ExplicitnessSettings {
    fn default() -> Self {
        let p = ExplicitnessParams::new(BinningSpec::default(), 0);
        Self {
            test_fraction: p.test_fraction,
            classifier: p.classifier,
            logistic: p.logistic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SapSettings {
    pub dead_code_threshold: f64,
    pub depth_grid: Vec<usize>,
    pub cv_folds: usize,
    pub test_fraction: f64,
}

impl Default for SapSettings {
    fn default() -> Self {
        let p = SapParams::new(0);
        Self {
            dead_code_threshold: p.dead_code_threshold,
            depth_grid: p.depth_grid,
            cv_folds: p.cv_folds,
            test_fraction: p.test_fraction,
        }
    }
}

/// Metric hyper-parameters shared by every entry point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSettings {
    pub factor_bins: usize,
    pub code_bins: usize,
    pub intervention: InterventionSettings,
    pub dci: DciSettings,
    pub explicitness: ExplicitnessSettings,
    pub sap: SapSettings,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            factor_bins: 10,
            code_bins: 10,
            intervention: InterventionSettings::default(),
            dci: DciSettings::default(),
            explicitness: ExplicitnessSettings::default(),
            sap: SapSettings::default(),
        }
    }
}

impl MetricSettings {
    pub fn intervention_params(&self, binning: DiscretizationConfig, seed: u64) -> InterventionParams {
        let s = &self.intervention;
        InterventionParams {
            num_batches: s.num_batches,
            pairs_per_batch: s.pairs_per_batch,
            samples_per_subset: s.samples_per_subset,
            num_train_points: s.num_train_points,
            logistic: s.logistic,
            ..InterventionParams::new(binning, seed)
        }
    }

    pub fn dci_params(&self, random_forest: bool, seed: u64) -> DciParams {
        let s = &self.dci;
        let mut p = if random_forest {
            DciParams::random_forest(seed)
        } else {
            DciParams::lasso(seed)
        };
        p.test_fraction = s.test_fraction;
        p.cv_folds = s.cv_folds;
        p.lasso_grid = s.lasso_grid.clone();
        p.lasso.tol = s.lasso_tol;
        p.lasso.max_sweeps = s.lasso_max_sweeps;
        p.depth_grid = s.depth_grid.clone();
        p.forest.num_trees = s.num_trees;
        p.forest.tree.min_leaf = s.min_leaf;
        p.mse_scale = s.mse_scale;
        p
    }

    pub fn explicitness_params(&self, factor_bins: BinningSpec, seed: u64) -> ExplicitnessParams {
        ExplicitnessParams {
            test_fraction: self.explicitness.test_fraction,
            classifier: self.explicitness.classifier,
            logistic: self.explicitness.logistic,
            ..ExplicitnessParams::new(factor_bins, seed)
        }
    }

    pub fn sap_params(&self, seed: u64) -> SapParams {
        SapParams {
            dead_code_threshold: self.sap.dead_code_threshold,
            depth_grid: self.sap.depth_grid.clone(),
            cv_folds: self.sap.cv_folds,
            test_fraction: self.sap.test_fraction,
            ..SapParams::new(seed)
        }
    }

    fn validate(&self) -> InputResult<()> {
        if self.factor_bins < 2 || self.code_bins < 2 {
            return Err(InputError::Config(format!(
                "bin counts must be at least 2, got factor_bins={} code_bins={}",
                self.factor_bins, self.code_bins
            )));
        }
        for (name, f) in [
            ("dci.test_fraction", self.dci.test_fraction),
            ("explicitness.test_fraction", self.explicitness.test_fraction),
            ("sap.test_fraction", self.sap.test_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(InputError::Config(format!("{name} must lie in (0, 1), got {f}")));
            }
        }
        Ok(())
    }
}

/// Contents of the `--config` JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Metric names to run; empty runs all of them.
    pub metrics: Vec<String>,
    /// Seeds to average over; empty falls back to the command-line seed.
    pub seeds: Vec<u64>,
    pub settings: MetricSettings,
    /// Maximum concurrent seed evaluations; the command line overrides it.
    pub jobs: Option<usize>,
    /// Output formats; the command line overrides them.
    pub formats: Option<Vec<Format>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            metrics: Vec::new(),
            seeds: Vec::new(),
            settings: MetricSettings::default(),
            jobs: None,
            formats: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> InputResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| InputError::parse(path, e.line() as u64, e.to_string()))?;
        cfg.settings.validate()?;
        cfg.resolve_metrics()?;
        Ok(cfg)
    }

    pub fn resolve_metrics(&self) -> InputResult<Vec<Metric>> {
        if self.metrics.is_empty() {
            return Ok(Metric::ALL.to_vec());
        }
        let mut out = Vec::new();
        for name in &self.metrics {
            let m = Metric::parse(name).ok_or_else(|| {
                InputError::Config(format!(
                    "unknown metric '{name}'; expected one of {}",
                    Metric::ALL.map(Metric::name).join(", ")
                ))
            })?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}
