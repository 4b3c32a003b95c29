use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {matrix} at row {row}, column {col}")]
    NonFinite {
        matrix: &'static str,
        row: usize,
        col: usize,
    },

    #[error("categorical factor {factor} holds a non-class value at row {row}")]
    InvalidCategory { factor: usize, row: usize },

    #[error("chance level must lie in [0, 1), got {0}")]
    InvalidChance(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("bin index {index} out of range for {num_bins} bins")]
    BinOutOfRange { index: usize, num_bins: usize },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("factor {factor} bin {bin} holds {count} sample(s); at least 2 are needed to form pairs")]
    InsufficientPairs {
        factor: usize,
        bin: usize,
        count: usize,
    },

    #[error("stratum of factor {factor} bin {bin} holds {available} sample(s), {required} required")]
    InsufficientStratum {
        factor: usize,
        bin: usize,
        available: usize,
        required: usize,
    },

    #[error("only one class present in {0}")]
    SingleClass(&'static str),

    #[error("all values tied; rank correlation undefined")]
    AllTied,

    #[error("cannot aggregate reports of different metrics ({0} vs {1})")]
    MixedMetric(String, String),

    #[error("no factor columns would be retained")]
    ZeroColumns,

    #[error("total factor entropy is zero")]
    ZeroEntropy,
}
