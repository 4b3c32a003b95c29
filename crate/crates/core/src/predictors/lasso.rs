//! L1-regularized least squares fitted by cyclic coordinate descent.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoParams {
    pub lambda: f64,
    /// Stop once the largest weight change in a sweep falls below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Scale every column to unit variance before fitting.
    pub standardize: bool,
}

impl Default for LassoParams {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            tol: 1e-7,
            max_sweeps: 1000,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoModel {
    /// Weights on the original feature scale.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// Weights on the (centered, optionally standardized) fitting scale.
    pub fitted_weights: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after initialisation and after every sweep.
    pub objective_trace: Vec<f64>,
}

#[inline]
fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Minimises `(1/2N)·Σ(y − ŷ)² + λ·Σ|w|`. A run that exhausts `max_sweeps`
/// still returns its model with `converged == false`.
pub fn fit_lasso(x: &Matrix, y: &[f64], params: &LassoParams) -> Result<LassoModel> {
    let n = x.nrows();
    let d = x.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            what: "lasso targets",
            expected: n,
            found: y.len(),
        });
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!("lasso needs N >= 2, got {n}")));
    }
    if params.lambda < 0.0 || !params.lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {}", params.lambda)));
    }
    let nf = n as f64;

    let mut cols: Vec<Vec<f64>> = (0..d).map(|j| x.column(j)).collect();
    let mut means = vec![0.0; d];
    let mut scales = vec![1.0; d];
    let mut col_sq = vec![0.0; d];
    for (j, c) in cols.iter_mut().enumerate() {
        let mu = c.iter().sum::<f64>() / nf;
        c.iter_mut().for_each(|v| *v -= mu);
        let var = c.iter().map(|v| v * v).sum::<f64>() / nf;
        means[j] = mu;
        if params.standardize && var > 0.0 {
            let sd = var.sqrt();
            scales[j] = sd;
            c.iter_mut().for_each(|v| *v /= sd);
        }
        col_sq[j] = c.iter().map(|v| v * v).sum::<f64>() / nf;
    }

    let y_mean = y.iter().sum::<f64>() / nf;
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut w = vec![0.0; d];

    let objective = |r: &[f64], w: &[f64]| {
        r.iter().map(|v| v * v).sum::<f64>() / (2.0 * nf)
            + params.lambda * w.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut trace = vec![objective(&resid, &w)];
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..d {
            // zero-variance columns keep weight 0
            if col_sq[j] <= 1e-300 {
                continue;
            }
            let c = &cols[j];
            let rho = c.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>() / nf + col_sq[j] * w[j];
            let updated = soft_threshold(rho, params.lambda) / col_sq[j];
            let delta = updated - w[j];
            if delta != 0.0 {
                resid.iter_mut().zip(c).for_each(|(r, v)| *r -= delta * v);
                w[j] = updated;
                max_change = max_change.max(delta.abs());
            }
        }
        trace.push(objective(&resid, &w));
        if max_change < params.tol {
            converged = true;
            break;
        }
    }

    let weights: Vec<f64> = w.iter().zip(&scales).map(|(wj, s)| wj / s).collect();
    let intercept = y_mean - weights.iter().zip(&means).map(|(a, b)| a * b).sum::<f64>();
    Ok(LassoModel {
        weights,
        intercept,
        lambda: params.lambda,
        fitted_weights: w,
        sweeps,
        converged,
        objective_trace: trace,
    })
}

impl LassoModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                what: "lasso feature count",
                expected: self.weights.len(),
                found: x.ncols(),
            });
        }
        Ok((0..x.nrows())
            .map(|r| {
                self.intercept
                    + x.row(r)
                        .iter()
                        .zip(&self.weights)
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn col(x: &[f64]) -> Matrix {
        Matrix::new(x.len(), 1, x.to_vec()).unwrap()
    }

    #[test]
    fn exact_linear_fit() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
        let m = fit_lasso(
            &col(&x),
            &x,
            &LassoParams {
                lambda: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-6);
        assert!(m.intercept.abs() < 1e-6);
        assert!(m.converged);
        let p = m.predict(&col(&[0.2])).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn large_lambda_shrinks_everything() {
        let mut rng = seeded(1);
        let x = Matrix::new(100, 3, (0..300).map(|_| rng.gen()).collect()).unwrap();
        let y: Vec<f64> = (0..100).map(|r| x.get(r, 0) * 3.0 - x.get(r, 2)).collect();
        let m = fit_lasso(
            &x,
            &y,
            &LassoParams {
                lambda: 1e6,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn zero_variance_column_gets_zero_weight() {
        let x = Matrix::from_columns(&[vec![1.0, 2.0, 3.0, 4.0], vec![5.0; 4]]).unwrap();
        let y = vec![2.0, 4.0, 6.0, 8.0];
        let m = fit_lasso(&x, &y, &LassoParams::default()).unwrap();
        assert_eq!(m.weights[1], 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut rng = seeded(2);
        let x = Matrix::new(50, 4, (0..200).map(|_| rng.gen()).collect()).unwrap();
        let y: Vec<f64> = (0..50).map(|_| rng.gen()).collect();
        let m = fit_lasso(
            &x,
            &y,
            &LassoParams {
                lambda: 1e-4,
                tol: 0.0,
                max_sweeps: 3,
                standardize: true,
            },
        )
        .unwrap();
        assert!(!m.converged);
        assert_eq!(m.sweeps, 3);
    }

    #[test]
    fn shape_errors() {
        assert!(fit_lasso(&col(&[1.0]), &[1.0], &LassoParams::default()).is_err());
        assert!(fit_lasso(&col(&[1.0, 2.0]), &[1.0], &LassoParams::default()).is_err());
        let m = fit_lasso(&col(&[1.0, 2.0, 3.0]), &[1.0, 2.0, 3.0], &LassoParams::default()).unwrap();
        assert!(m.predict(&Matrix::zeros(1, 2)).is_err());
    }

    proptest! {
        #[test]
        fn single_feature_closed_form(
            raw in prop::collection::vec(-5.0f64..5.0, 5..60),
            noise in prop::collection::vec(-1.0f64..1.0, 60),
            slope in -3.0f64..3.0,
            lambda in 0.0f64..2.0,
        ) {
            let n = raw.len() as f64;
            let mu = raw.iter().sum::<f64>() / n;
            let sd = (raw.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n).sqrt();
            prop_assume!(sd > 1e-3);
            let x: Vec<f64> = raw.iter().map(|v| (v - mu) / sd).collect();
            let y: Vec<f64> = x.iter().zip(&noise).map(|(a, e)| slope * a + e).collect();
            let m = fit_lasso(&col(&x), &y, &LassoParams {
                lambda, tol: 1e-12, max_sweeps: 100, standardize: false,
            }).unwrap();
            let xy = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / n;
            let xx = x.iter().map(|a| a * a).sum::<f64>() / n;
            let closed = soft_threshold(xy, lambda) / xx;
            prop_assert!((m.weights[0] - closed).abs() < 1e-6);
        }

        #[test]
        fn objective_never_increases(seed in 0u64..500, lambda in 0.0f64..0.5) {
            let mut rng = seeded(seed);
            let x = Matrix::new(40, 5, (0..200).map(|_| rng.gen::<f64>()).collect()).unwrap();
            let y: Vec<f64> = (0..40).map(|r| x.get(r, 0) - 2.0 * x.get(r, 3) + rng.gen::<f64>()).collect();
            let m = fit_lasso(&x, &y, &LassoParams { lambda, tol: 1e-10, max_sweeps: 200, standardize: true }).unwrap();
            for w in m.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }
}
