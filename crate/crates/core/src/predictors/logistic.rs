//! Logistic regression trained by full-batch gradient descent, either as one
//! binary model per class or as a single softmax model.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub l2: f64,
    pub epochs: usize,
    /// Step size, capped at the inverse Lipschitz bound of the loss.
    pub lr: f64,
    /// Weight each class by the inverse of its frequency.
    pub balanced: bool,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 300,
            lr: 4.0,
            balanced: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogisticKind {
    OneVsRest,
    Multinomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub kind: LogisticKind,
    /// `num_classes × d`, acting on standardized inputs.
    pub weights: Matrix,
    pub intercepts: Vec<f64>,
    pub class_weights: Vec<f64>,
    means: Vec<f64>,
    scales: Vec<f64>,
}

/// Standardized copy of `x` with its column means and scales.
fn standardize(x: &Matrix) -> (Matrix, Vec<f64>, Vec<f64>) {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let mut means = vec![0.0; d];
    let mut scales = vec![1.0; d];
    for j in 0..d {
        let c = x.column(j);
        let mu = c.iter().sum::<f64>() / n;
        let var = c.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
        means[j] = mu;
        if var > 0.0 {
            scales[j] = var.sqrt();
        }
    }
    let mut out = x.clone();
    for r in 0..x.nrows() {
        for j in 0..d {
            out.set(r, j, (x.get(r, j) - means[j]) / scales[j]);
        }
    }
    (out, means, scales)
}

/// Largest eigenvalue of the weighted Gram matrix of `[x, 1]`, by power
/// iteration. Used to bound the step size.
fn gram_spectral_bound(x: &Matrix, w: &[f64]) -> f64 {
    let d = x.ncols() + 1;
    let total: f64 = w.iter().sum();
    let mut g = vec![0.0; d * d];
    for r in 0..x.nrows() {
        let row = x.row(r);
        let wr = w[r] / total;
        for a in 0..d {
            let xa = if a < d - 1 { row[a] } else { 1.0 };
            for b in a..d {
                let xb = if b < d - 1 { row[b] } else { 1.0 };
                g[a * d + b] += wr * xa * xb;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            g[a * d + b] = g[b * d + a];
        }
    }
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda = 0.0;
    for _ in 0..50 {
        let mut next = vec![0.0; d];
        for a in 0..d {
            next[a] = (0..d).map(|b| g[a * d + b] * v[b]).sum();
        }
        let norm = next.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        lambda = norm;
        v = next.into_iter().map(|t| t / norm).collect();
    }
    // power iteration approaches from below; pad a little
    lambda * 1.05
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check(x: &Matrix, labels: &[usize], num_classes: usize, params: &LogisticParams) -> Result<()> {
    if labels.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            what: "logistic labels",
            expected: x.nrows(),
            found: labels.len(),
        });
    }
    if x.nrows() == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some((row, col)) = x.first_non_finite() {
        return Err(Error::NonFinite {
            matrix: "logistic features",
            row,
            col,
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::InvalidParameter(format!(
            "label {bad} outside 0..{num_classes}"
        )));
    }
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        return Err(Error::SingleClass("logistic training labels"));
    }
    if !(params.lr > 0.0) || params.l2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "logistic lr = {}, l2 = {}",
            params.lr, params.l2
        )));
    }
    Ok(())
}

fn class_counts(labels: &[usize], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    labels.iter().for_each(|&l| c[l] += 1);
    c
}

impl LogisticModel {
    /// One binary model per class. With `balanced`, the positive and negative
    /// halves of each binary problem carry equal total weight.
    pub fn fit_ovr(x: &Matrix, labels: &[usize], num_classes: usize, params: &LogisticParams) -> Result<Self> {
        check(x, labels, num_classes, params)?;
        let (xs, means, scales) = standardize(x);
        let n = x.nrows();
        let d = x.ncols();
        let counts = class_counts(labels, num_classes);
        let mut weights = Matrix::zeros(num_classes, d);
        let mut intercepts = vec![0.0; num_classes];
        let mut class_weights = vec![1.0; num_classes];

        for k in 0..num_classes {
            let pos = counts[k];
            let neg = n - pos;
            let (wp, wn) = if params.balanced && pos > 0 && neg > 0 {
                (n as f64 / (2.0 * pos as f64), n as f64 / (2.0 * neg as f64))
            } else {
                (1.0, 1.0)
            };
            class_weights[k] = wp;
            let sw: Vec<f64> = labels.iter().map(|&l| if l == k { wp } else { wn }).collect();
            let target: Vec<f64> = labels.iter().map(|&l| f64::from(l == k)).collect();
            let lipschitz = 0.25 * gram_spectral_bound(&xs, &sw) + params.l2;
            let step = params.lr.min(1.0 / lipschitz);
            let (w, b) = binary_gd(&xs, &target, &sw, params, step);
            for j in 0..d {
                weights.set(k, j, w[j]);
            }
            intercepts[k] = b;
        }
        Ok(Self {
            kind: LogisticKind::OneVsRest,
            weights,
            intercepts,
            class_weights,
            means,
            scales,
        })
    }

    /// Softmax regression over all classes jointly.
    pub fn fit_multinomial(
        x: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &LogisticParams,
    ) -> Result<Self> {
        check(x, labels, num_classes, params)?;
        let (xs, means, scales) = standardize(x);
        let n = x.nrows();
        let d = x.ncols();
        let counts = class_counts(labels, num_classes);
        let present = counts.iter().filter(|&&c| c > 0).count() as f64;
        let class_weights: Vec<f64> = counts
            .iter()
            .map(|&c| {
                if params.balanced && c > 0 {
                    n as f64 / (present * c as f64)
                } else {
                    1.0
                }
            })
            .collect();
        let sw: Vec<f64> = labels.iter().map(|&l| class_weights[l]).collect();
        let total: f64 = sw.iter().sum();
        let lipschitz = 0.5 * gram_spectral_bound(&xs, &sw) + params.l2;
        let step = params.lr.min(1.0 / lipschitz);

        let k = num_classes;
        let mut w = vec![0.0; k * d];
        let mut b = vec![0.0; k];
        let mut gw = vec![0.0; k * d];
        let mut gb = vec![0.0; k];
        let mut p = vec![0.0; k];
        for _ in 0..params.epochs {
            gw.iter_mut().for_each(|v| *v = 0.0);
            gb.iter_mut().for_each(|v| *v = 0.0);
            for r in 0..n {
                let row = xs.row(r);
                let mut zmax = f64::NEG_INFINITY;
                for c in 0..k {
                    let z = b[c] + row.iter().zip(&w[c * d..(c + 1) * d]).map(|(a, b)| a * b).sum::<f64>();
                    p[c] = z;
                    zmax = zmax.max(z);
                }
                let mut s = 0.0;
                p.iter_mut().for_each(|z| {
                    *z = (*z - zmax).exp();
                    s += *z;
                });
                let wr = sw[r] / total;
                for c in 0..k {
                    let g = wr * (p[c] / s - f64::from(labels[r] == c));
                    gb[c] += g;
                    for (gj, xj) in gw[c * d..(c + 1) * d].iter_mut().zip(row) {
                        *gj += g * xj;
                    }
                }
            }
            for i in 0..k * d {
                w[i] -= step * (gw[i] + params.l2 * w[i]);
            }
            for c in 0..k {
                b[c] -= step * gb[c];
            }
        }
        Ok(Self {
            kind: LogisticKind::Multinomial,
            weights: Matrix::new(k, d, w)?,
            intercepts: b,
            class_weights,
            means,
            scales,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.intercepts.len()
    }

    /// Raw linear scores, `N × num_classes`.
    pub fn decision_function(&self, x: &Matrix) -> Result<Matrix> {
        let d = self.means.len();
        if x.ncols() != d {
            return Err(Error::DimensionMismatch {
                what: "logistic feature count",
                expected: d,
                found: x.ncols(),
            });
        }
        let k = self.num_classes();
        let mut out = Matrix::zeros(x.nrows(), k);
        let mut z = vec![0.0; d];
        for r in 0..x.nrows() {
            let row = x.row(r);
            for j in 0..d {
                z[j] = (row[j] - self.means[j]) / self.scales[j];
            }
            for c in 0..k {
                let s = self.intercepts[c]
                    + self.weights.row(c).iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
                out.set(r, c, s);
            }
        }
        Ok(out)
    }

    /// Class probabilities. One-vs-rest sigmoids are renormalized to sum to 1.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        let mut s = self.decision_function(x)?;
        let k = self.num_classes();
        for r in 0..s.nrows() {
            let row: Vec<f64> = s.row(r).to_vec();
            let probs: Vec<f64> = match self.kind {
                LogisticKind::OneVsRest => {
                    let sig: Vec<f64> = row.iter().map(|&z| sigmoid(z)).collect();
                    let total: f64 = sig.iter().sum();
                    if total > 0.0 {
                        sig.iter().map(|v| v / total).collect()
                    } else {
                        vec![1.0 / k as f64; k]
                    }
                }
                LogisticKind::Multinomial => {
                    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let e: Vec<f64> = row.iter().map(|z| (z - m).exp()).collect();
                    let total: f64 = e.iter().sum();
                    e.iter().map(|v| v / total).collect()
                }
            };
            for (c, p) in probs.into_iter().enumerate() {
                s.set(r, c, p);
            }
        }
        Ok(s)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        let s = self.decision_function(x)?;
        Ok((0..s.nrows()).map(|r| super::tree::argmax(s.row(r))).collect())
    }
}

/// Weighted binary cross-entropy with L2 on the weights (not the intercept).
fn binary_gd(x: &Matrix, y: &[f64], sw: &[f64], params: &LogisticParams, step: f64) -> (Vec<f64>, f64) {
    let n = x.nrows();
    let d = x.ncols();
    let total: f64 = sw.iter().sum();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut gw = vec![0.0; d];
    for _ in 0..params.epochs {
        gw.iter_mut().for_each(|v| *v = 0.0);
        let mut gb = 0.0;
        for r in 0..n {
            let row = x.row(r);
            let z = b + row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
            let g = sw[r] / total * (sigmoid(z) - y[r]);
            gb += g;
            for (gj, xj) in gw.iter_mut().zip(row) {
                *gj += g * xj;
            }
        }
        for j in 0..d {
            w[j] -= step * (gw[j] + params.l2 * w[j]);
        }
        b -= step * gb;
    }
    (w, b)
}
