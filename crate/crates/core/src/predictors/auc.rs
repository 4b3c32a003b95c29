use crate::error::{Error, Result};

/// Area under the ROC curve through the Mann–Whitney U statistic, with tied
/// scores counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "roc_auc labels",
            expected: scores.len(),
            found: labels.len(),
        });
    }
    if let Some(row) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite {
            matrix: "roc_auc scores",
            row,
            col: 0,
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass("roc_auc labels"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (1-based, tie-averaged) ranks of the positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k]).count();
        rank_sum += mid * pos_in_group as f64;
        i = j + 1;
    }
    let np = n_pos as f64;
    let u = rank_sum - np * (np + 1.0) / 2.0;
    Ok(u / (np * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(scores: &[f64], labels: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            for (j, &lj) in labels.iter().enumerate() {
                if li && !lj {
                    den += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    #[test]
    fn examples() {
        let l = [false, false, true, true];
        assert_eq!(roc_auc(&[0.1, 0.2, 0.3, 0.4], &l).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.4, 0.3, 0.2, 0.1], &l).unwrap(), 0.0);
        assert_eq!(roc_auc(&[0.1, 0.4, 0.35, 0.8], &l).unwrap(), 0.75);
        assert_eq!(roc_auc(&[0.5; 4], &l).unwrap(), 0.5);
    }

    #[test]
    fn one_class_is_an_error() {
        assert_eq!(
            roc_auc(&[0.1, 0.2], &[true, true]).unwrap_err(),
            Error::SingleClass("roc_auc labels")
        );
    }

    proptest! {
        #[test]
        fn matches_pairwise_count(
            pairs in prop::collection::vec((0u8..6, any::<bool>()), 2..60)
        ) {
            let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let labels: Vec<bool> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let a = roc_auc(&scores, &labels).unwrap();
            prop_assert!((a - brute(&scores, &labels)).abs() < 1e-12);
        }

        #[test]
        fn negated_scores_complement(
            raw in prop::collection::btree_set(-1000i32..1000, 2..50),
            flips in prop::collection::vec(any::<bool>(), 50),
        ) {
            let scores: Vec<f64> = raw.iter().map(|&v| f64::from(v)).collect();
            let labels: Vec<bool> = flips[..scores.len()].to_vec();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let neg: Vec<f64> = scores.iter().map(|v| -v).collect();
            let s = roc_auc(&scores, &labels).unwrap() + roc_auc(&neg, &labels).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
