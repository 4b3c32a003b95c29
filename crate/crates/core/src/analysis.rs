//! Rank correlation between metrics and aggregation of repeated runs.

use serde::{Deserialize, Serialize};

use crate::data::{Matrix, MetricReport};
use crate::error::{Error, Result};

/// Counts exchanges needed to sort `v` (i.e. strict inversions) with a
/// bottom-up merge sort; `v` ends up sorted.
fn inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    let mut buf = v.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if v[j] < v[i] {
                    buf[k] = v[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + end - j].copy_from_slice(&v[j..end]);
            start = end;
        }
        v.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// Sum of `t(t−1)/2` over runs of equal values in a sorted sequence.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Kendall tau-b in `O(K log K)`.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "kendall_tau inputs",
            expected: a.len(),
            found: b.len(),
        });
    }
    let k = a.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!("kendall tau needs at least 2 items, got {k}")));
    }
    if let Some(row) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            matrix: "kendall_tau input",
            row: row % k,
            col: row / k,
        });
    }
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let n0 = (k as u64) * (k as u64 - 1) / 2;
    let n1 = tied_pairs(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let n3 = tied_pairs(&pairs);
    let mut bs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = inversions(&mut bs);
    let n2 = tied_pairs(&bs);
    if n1 == n0 || n2 == n0 {
        return Err(Error::AllTied);
    }
    let num = n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    let den = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    Ok((num / den).clamp(-1.0, 1.0))
}

/// Kendall tau-b ×100 between every pair of rows of a metrics × configurations
/// table.
pub fn correlation_matrix(table: &Matrix) -> Result<Matrix> {
    if table.ncols() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 configurations, got {}",
            table.ncols()
        )));
    }
    let m = table.nrows();
    let mut out = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let t = 100.0 * kendall_tau(table.row(i), table.row(j))?;
            out.set(i, j, t);
            out.set(j, i, t);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub metric: String,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single run.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_factor_mean: Option<Vec<f64>>,
}

/// Mean and sample standard deviation; a single value has std 0.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

pub fn aggregate_seeds(reports: &[MetricReport]) -> Result<SeedSummary> {
    let first = reports.first().ok_or(Error::EmptyInput)?;
    if let Some(other) = reports.iter().find(|r| r.metric != first.metric) {
        return Err(Error::MixedMetric(first.metric.clone(), other.metric.clone()));
    }
    let values: Vec<f64> = reports.iter().map(|r| r.overall).collect();
    let (mean, std) = mean_std(&values)?;
    let per_factor_mean = first.per_factor.as_ref().and_then(|pf| {
        let len = pf.len();
        let all: Option<Vec<&Vec<f64>>> = reports
            .iter()
            .map(|r| r.per_factor.as_ref().filter(|v| v.len() == len))
            .collect();
        all.map(|rows| {
            (0..len)
                .map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / rows.len() as f64)
                .collect()
        })
    });
    Ok(SeedSummary {
        metric: first.metric.clone(),
        count: reports.len(),
        mean,
        std,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        per_factor_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Property;
    use proptest::prelude::*;

    /// Direct tau-b over all pairs.
    fn brute_tau(a: &[f64], b: &[f64]) -> f64 {
        let (mut c, mut d, mut ta, mut tb) = (0.0, 0.0, 0.0, 0.0);
        let mut n0: f64 = 0.0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                n0 += 1.0;
                let s = (a[i] - a[j]).signum() * (b[i] - b[j]).signum();
                if a[i] == a[j] {
                    ta += 1.0;
                }
                if b[i] == b[j] {
                    tb += 1.0;
                }
                if a[i] != a[j] && b[i] != b[j] {
                    if s > 0.0 {
                        c += 1.0;
                    } else {
                        d += 1.0;
                    }
                }
            }
        }
        (c - d) / ((n0 - ta) * (n0 - tb)).sqrt()
    }

    #[test]
    fn tau_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((kendall_tau(&a, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(kendall_tau(&a, &[1.0; 4]).unwrap_err(), Error::AllTied);
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn matrix_examples() {
        let t = Matrix::from_rows(&[
            vec![0.1, 0.5, 0.3, 0.9],
            vec![1.2, 2.0, 1.6, 2.8],
            vec![0.9, 0.5, 0.7, 0.1],
        ])
        .unwrap();
        let c = correlation_matrix(&t).unwrap();
        assert_eq!(c.get(0, 0), 100.0);
        assert_eq!(c.get(0, 1), 100.0);
        assert_eq!(c.get(0, 2), -100.0);
        assert_eq!(c.get(2, 0), c.get(0, 2));
        assert!(correlation_matrix(&Matrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn seed_aggregation() {
        let r = |v: f64| MetricReport::from_factors("mig", Property::Compactness, vec![v, v], 0);
        let s = aggregate_seeds(&[r(0.4)]).unwrap();
        assert_eq!((s.mean, s.std), (0.4, 0.0));
        let s = aggregate_seeds(&[r(0.4), r(0.6)]).unwrap();
        assert!((s.mean - 0.5).abs() < 1e-12);
        assert!((s.std - 0.141_421_356).abs() < 1e-6);
        assert_eq!(s.per_factor_mean.as_deref().map(|v| v.len()), Some(2));
        let other = MetricReport::scalar("sap", Property::Compactness, 0.1, 0);
        assert_eq!(
            aggregate_seeds(&[r(0.4), other]).unwrap_err(),
            Error::MixedMetric("mig".into(), "sap".into())
        );
        assert_eq!(aggregate_seeds(&[]).unwrap_err(), Error::EmptyInput);
    }

    proptest! {
        #[test]
        fn tau_matches_pair_counting(
            pairs in prop::collection::vec((0u8..8, 0u8..8), 2..50)
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let b: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            match kendall_tau(&a, &b) {
                Ok(t) => prop_assert!((t - brute_tau(&a, &b)).abs() < 1e-12),
                Err(e) => prop_assert_eq!(e, Error::AllTied),
            }
        }

        #[test]
        fn tau_symmetric_and_monotone_invariant(
            a in prop::collection::vec(-100.0f64..100.0, 2..40),
            b in prop::collection::vec(-100.0f64..100.0, 40),
        ) {
            let b = &b[..a.len()];
            if let Ok(t) = kendall_tau(&a, b) {
                prop_assert!((t - kendall_tau(b, &a).unwrap()).abs() < 1e-12);
                let a3: Vec<f64> = a.iter().map(|v| v.powi(3) + 2.0 * v).collect();
                prop_assert!((t - kendall_tau(&a3, b).unwrap()).abs() < 1e-12);
            }
        }
    }
}
