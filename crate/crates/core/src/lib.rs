//! Disentanglement metrics for representation learning: information-based,
//! predictor-based and intervention-based scores, plus the synthetic
//! factor/code generators and analysis tools used to study them.

pub mod analysis;
pub mod data;
pub mod discretize;
pub mod error;
pub mod infotheory;
pub mod metrics;
pub mod predictors;
pub mod rng;
pub mod synthgen;

pub use data::{
    rescale_by_chance, validate_pair, Aggregation, CodeMatrix, FactorKind, FactorMatrix,
    ImportanceMatrix, ImportanceSource, Matrix, MetricReport, Property,
};
pub use discretize::{BinningSpec, BinningStrategy, DiscretizationConfig};
pub use error::{Error, Result};
pub use infotheory::InformationTable;
