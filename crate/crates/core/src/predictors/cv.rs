use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome<P> {
    pub best: P,
    pub best_index: usize,
    /// Mean held-out score per grid entry; NaN marks an excluded entry.
    pub scores: Vec<f64>,
}

/// Fold index per sample: a seeded shuffle dealt round-robin into `folds`.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {folds}")));
    }
    if n < folds {
        return Err(Error::InsufficientData(format!(
            "{n} samples cannot fill {folds} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(seed));
    let mut fold = vec![0; n];
    for (i, &s) in order.iter().enumerate() {
        fold[s] = i % folds;
    }
    Ok(fold)
}

/// K-fold search over `grid`. `eval(params, train, test)` returns the held-out
/// score; a NaN return excludes that entry. Ties go to the earliest entry.
pub fn cross_validate<P: Clone>(
    n: usize,
    folds: usize,
    seed: u64,
    grid: &[P],
    objective: Objective,
    mut eval: impl FnMut(&P, &[usize], &[usize]) -> Result<f64>,
) -> Result<CvOutcome<P>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    let assign = fold_assignment(n, folds, seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| {
            let train = (0..n).filter(|&i| assign[i] != f).collect();
            let test = (0..n).filter(|&i| assign[i] == f).collect();
            (train, test)
        })
        .collect();
    let mut scores = Vec::with_capacity(grid.len());
    for p in grid {
        let mut total = 0.0;
        for (train, test) in &splits {
            total += eval(p, train, test)?;
        }
        scores.push(total / folds as f64);
    }
    let mut best_index = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        let better = match best_index {
            None => true,
            Some(b) => match objective {
                Objective::Maximize => s > scores[b],
                Objective::Minimize => s < scores[b],
            },
        };
        if better {
            best_index = Some(i);
        }
    }
    let best_index = best_index.unwrap_or(0);
    Ok(CvOutcome {
        best: grid[best_index].clone(),
        best_index,
        scores,
    })
}
