//! The three metric families. Every metric returns a [`MetricReport`]
//! (DCI returns its three parts together in a [`predictor::DciReport`]).
//!
//! [`MetricReport`]: crate::data::MetricReport

pub mod information;
pub mod intervention;
pub mod predictor;

/// Index of the largest value, the largest value and the runner-up. Ties go
/// to the lowest index, so two equal leaders give a zero gap. A single
/// entry has runner-up 0.
pub(crate) fn top_two(values: &[f64]) -> (usize, f64, f64) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let second = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let second = if second.is_finite() { second } else { 0.0 };
    (best, values[best], second)
}
