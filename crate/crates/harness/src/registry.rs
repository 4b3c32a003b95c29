//! Name-to-implementation table for every metric the harness can run.

use disentangle_core::discretize::{BinningSpec, DiscretizationConfig};
use disentangle_core::metrics::{information, intervention, predictor};
use disentangle_core::rng::derive_seed;
use disentangle_core::{CodeMatrix, FactorMatrix, InformationTable, MetricReport};
use serde::{Deserialize, Serialize};

use crate::config::MetricSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Intervention,
    Predictor,
    Information,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Intervention, Family::Predictor, Family::Information];

    pub fn name(self) -> &'static str {
        match self {
            Family::Intervention => "intervention",
            Family::Predictor => "predictor",
            Family::Information => "information",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    ZDiff,
    ZMinVar,
    ZMaxVar,
    Irs,
    DciLasso,
    DciRf,
    ExplicitnessScore,
    Sap,
    Mig,
    MigSup,
    Jemmig,
    ModularityScore,
    Dcimig,
}

/// Score columns in report order. DCI contributes three columns per backend.
pub const COLUMNS: [&str; 17] = [
    "z_diff",
    "z_min_var",
    "z_max_var",
    "irs",
    "dci_lasso_modularity",
    "dci_lasso_compactness",
    "dci_lasso_explicitness",
    "dci_rf_modularity",
    "dci_rf_compactness",
    "dci_rf_explicitness",
    "explicitness_score",
    "sap",
    "mig",
    "mig_sup",
    "jemmig",
    "modularity_score",
    "dcimig",
];

impl Metric {
    pub const ALL: [Metric; 13] = [
        Metric::ZDiff,
        Metric::ZMinVar,
        Metric::ZMaxVar,
        Metric::Irs,
        Metric::DciLasso,
        Metric::DciRf,
        Metric::ExplicitnessScore,
        Metric::Sap,
        Metric::Mig,
        Metric::MigSup,
        Metric::Jemmig,
        Metric::ModularityScore,
        Metric::Dcimig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ZDiff => intervention::Z_DIFF,
            Metric::ZMinVar => intervention::Z_MIN_VAR,
            Metric::ZMaxVar => intervention::Z_MAX_VAR,
            Metric::Irs => intervention::IRS,
            Metric::DciLasso => predictor::DCI_LASSO,
            Metric::DciRf => predictor::DCI_RF,
            Metric::ExplicitnessScore => predictor::EXPLICITNESS_SCORE,
            Metric::Sap => predictor::SAP,
            Metric::Mig => information::MIG,
            Metric::MigSup => information::MIG_SUP,
            Metric::Jemmig => information::JEMMIG,
            Metric::ModularityScore => information::MODULARITY_SCORE,
            Metric::Dcimig => information::DCIMIG,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn family(self) -> Family {
        match self {
            Metric::ZDiff | Metric::ZMinVar | Metric::ZMaxVar | Metric::Irs => Family::Intervention,
            Metric::DciLasso | Metric::DciRf | Metric::ExplicitnessScore | Metric::Sap => Family::Predictor,
            _ => Family::Information,
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Metric::DciLasso => &COLUMNS[4..7],
            Metric::DciRf => &COLUMNS[7..10],
            _ => {
                let i = COLUMNS.iter().position(|c| *c == self.name()).expect("listed column");
                &COLUMNS[i..i + 1]
            }
        }
    }

    fn index(self) -> u64 {
        Self::ALL.iter().position(|m| *m == self).expect("listed metric") as u64
    }
}

/// Columns produced by a metric selection, in report order.
pub fn columns_of(metrics: &[Metric]) -> Vec<&'static str> {
    COLUMNS
        .iter()
        .copied()
        .filter(|c| metrics.iter().any(|m| m.columns().contains(c)))
        .collect()
}

/// Result of one metric on one dataset under one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub metric: Metric,
    pub result: Result<Vec<MetricReport>, String>,
}

/// Runs `metrics` on one dataset. Each metric draws from its own stream
/// derived from `seed`, so results do not depend on which other metrics run.
/// Failures are captured per metric.
pub fn evaluate(
    metrics: &[Metric],
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    factor_binning: BinningSpec,
    settings: &MetricSettings,
    seed: u64,
) -> Vec<Outcome> {
    let binning = DiscretizationConfig {
        factors: BinningSpec {
            num_bins: settings.factor_bins,
            ..factor_binning
        },
        codes: BinningSpec::empirical(settings.code_bins),
    };
    let table = metrics
        .iter()
        .any(|m| m.family() == Family::Information)
        .then(|| InformationTable::compute(factors, codes, &binning));

    metrics
        .iter()
        .map(|&metric| {
            let s = derive_seed(seed, 100 + metric.index());
            let one = |r: disentangle_core::Result<MetricReport>| r.map(|r| vec![r]);
            let result = match metric {
                Metric::ZDiff => one(intervention::z_diff(
                    factors,
                    codes,
                    &settings.intervention_params(binning, s),
                )),
                Metric::ZMinVar => one(intervention::z_min_variance(
                    factors,
                    codes,
                    &settings.intervention_params(binning, s),
                )),
                Metric::ZMaxVar => one(intervention::z_max_variance(
                    factors,
                    codes,
                    &settings.intervention_params(binning, s),
                )),
                Metric::Irs => one(intervention::irs(factors, codes, &settings.intervention_params(binning, s))),
                Metric::DciLasso | Metric::DciRf => {
                    predictor::dci(factors, codes, &settings.dci_params(metric == Metric::DciRf, s))
                        .map(|r| r.to_reports())
                }
                Metric::ExplicitnessScore => one(predictor::explicitness_score(
                    factors,
                    codes,
                    &settings.explicitness_params(binning.factors, s),
                )),
                Metric::Sap => one(predictor::sap(factors, codes, &settings.sap_params(s))),
                _ => match table.as_ref().expect("computed for information metrics") {
                    Err(e) => Err(e.clone()),
                    Ok(t) => one(match metric {
                        Metric::Mig => information::mig(&t.mi, s),
                        Metric::MigSup => information::mig_sup(&t.mi, &t.factor_entropies, s),
                        Metric::Jemmig => {
                            information::jemmig(&t.mi, &t.joint_entropies, &t.factor_entropies, t.num_code_bins, s)
                        }
                        Metric::ModularityScore => information::modularity_score(&t.mi, s),
                        _ => information::dcimig(&t.mi, &t.factor_entropies, s),
                    }),
                },
            };
            Outcome {
                metric,
                result: result.map_err(|e| e.to_string()),
            }
        })
        .collect()
}
