//! Synthetic factor/code generators where the map `z = f(v)` is fully
//! controlled, plus factor masking to emulate unmeasured factors.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{CodeMatrix, FactorKind, FactorMatrix, Matrix};
use crate::discretize::{BinningSpec, DiscretizationConfig};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// A generated pair plus the factor binning that matches its known range.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub factors: FactorMatrix,
    pub codes: CodeMatrix,
    pub factor_binning: BinningSpec,
}

impl SyntheticData {
    /// Factor binning of the generator with empirical code binning.
    pub fn discretization(&self, code_bins: usize) -> DiscretizationConfig {
        DiscretizationConfig {
            factors: self.factor_binning,
            codes: BinningSpec::empirical(code_bins),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMode {
    /// Each angle becomes `[cos θ, sin θ]`.
    Trig,
    /// Each angle is copied `k` times.
    Redundant(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    NoiseMix,
    Rotation,
    Angles(AngleMode),
    Tangent,
    /// Identity codes with only a fraction of the factors measured.
    HiddenFactors(f64),
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn build(v: Matrix, z: Matrix, factor_binning: BinningSpec) -> Result<SyntheticData> {
    let m = v.ncols();
    let d = z.ncols();
    Ok(SyntheticData {
        factors: FactorMatrix::new(v, names("v", m), vec![FactorKind::Continuous; m])?,
        codes: CodeMatrix::new(z, names("z", d))?,
        factor_binning,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_size(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need at least one factor and one sample, got M={m}, N={n}"
        )));
    }
    Ok(())
}

fn uniform_factors(m: usize, n: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::new(n, m, (0..n * m).map(|_| rng.gen::<f64>()).collect()).expect("sized buffer")
}

/// `z = (1 − α)·v + α·n` with `v, n ~ U[0, 1)` independent and `d = M`.
pub fn gen_noise_mix(m: usize, n: usize, alpha: f64, seed: u64) -> Result<SyntheticData> {
    check_alpha(alpha)?;
    check_size(m, n)?;
    let mut rng = seeded(seed);
    let v = uniform_factors(m, n, &mut rng);
    let noise: Vec<f64> = (0..n * m).map(|_| rng.gen::<f64>()).collect();
    let z: Vec<f64> = v
        .as_slice()
        .iter()
        .zip(&noise)
        .map(|(a, e)| (1.0 - alpha) * a + alpha * e)
        .collect();
    build(v, Matrix::new(n, m, z)?, BinningSpec::fixed(10, 0.0, 1.0))
}

/// `z = v·R` with the circulant `R`: `1 − α` on the diagonal and `α` on the
/// wrapped superdiagonal, i.e. `z_j = (1 − α)·v_j + α·v_{j−1 mod M}`.
pub fn gen_rotation(m: usize, n: usize, alpha: f64, seed: u64) -> Result<SyntheticData> {
    check_alpha(alpha)?;
    check_size(m, n)?;
    if m < 2 {
        return Err(Error::InvalidParameter("rotation needs M >= 2".into()));
    }
    let mut rng = seeded(seed);
    let v = uniform_factors(m, n, &mut rng);
    let r = rotation_matrix(m, alpha);
    let mut z = Matrix::zeros(n, m);
    for s in 0..n {
        let row = v.row(s);
        for j in 0..m {
            z.set(s, j, (0..m).map(|i| row[i] * r.get(i, j)).sum());
        }
    }
    build(v, z, BinningSpec::fixed(10, 0.0, 1.0))
}

pub fn rotation_matrix(m: usize, alpha: f64) -> Matrix {
    let mut r = Matrix::zeros(m, m);
    for i in 0..m {
        r.set(i, i, 1.0 - alpha);
        let next = (i + 1) % m;
        r.set(i, next, r.get(i, next) + alpha);
    }
    r
}

/// Angles `θ ~ U[0, 2π)` encoded into 8 code dimensions: four factors as
/// `[cos θ, sin θ]` pairs, or `8/k` factors each copied `k` times.
pub fn gen_angles(n: usize, mode: AngleMode, seed: u64) -> Result<SyntheticData> {
    const WIDTH: usize = 8;
    let (m, copies) = match mode {
        AngleMode::Trig => (WIDTH / 2, 2),
        AngleMode::Redundant(k) if k >= 1 && WIDTH % k == 0 => (WIDTH / k, k),
        AngleMode::Redundant(k) => {
            return Err(Error::InvalidParameter(format!(
                "redundancy {k} must divide the code width {WIDTH}"
            )))
        }
    };
    check_size(m, n)?;
    let mut rng = seeded(seed);
    let v = Matrix::new(n, m, (0..n * m).map(|_| rng.gen::<f64>() * 2.0 * PI).collect())?;
    let mut z = Matrix::zeros(n, m * copies);
    for s in 0..n {
        for i in 0..m {
            let th = v.get(s, i);
            match mode {
                AngleMode::Trig => {
                    z.set(s, 2 * i, th.cos());
                    z.set(s, 2 * i + 1, th.sin());
                }
                AngleMode::Redundant(_) => {
                    for c in 0..copies {
                        z.set(s, i * copies + c, th);
                    }
                }
            }
        }
    }
    build(v, z, BinningSpec::fixed(10, 0.0, 2.0 * PI))
}

/// Monotone map of `[0, 1]` onto itself that grows more nonlinear with `α`,
/// fixing 0, 0.5 and 1.
pub fn tangent_map(v: f64, alpha: f64) -> f64 {
    let omega = 2.0 * (1000f64.powf(alpha - 0.25) / 2.0).atan();
    1000f64.powf(0.25 - alpha) * (omega * (v - 0.5)).tan() + 0.5
}

pub fn gen_tangent(m: usize, n: usize, alpha: f64, seed: u64) -> Result<SyntheticData> {
    check_alpha(alpha)?;
    check_size(m, n)?;
    let mut rng = seeded(seed);
    let v = uniform_factors(m, n, &mut rng);
    let z: Vec<f64> = v.as_slice().iter().map(|&x| tangent_map(x, alpha)).collect();
    build(v, Matrix::new(n, m, z)?, BinningSpec::fixed(10, 0.0, 1.0))
}

/// Keeps `⌈fraction·M⌉` factor columns chosen by a seeded shuffle, in their
/// original order.
pub fn mask_factors(factors: &FactorMatrix, fraction: f64, seed: u64) -> Result<FactorMatrix> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let m = factors.num_factors();
    // guard against 0.5·8 landing a hair above 4
    let keep = ((fraction * m as f64) - 1e-9).ceil().max(0.0) as usize;
    if keep == 0 {
        return Err(Error::ZeroColumns);
    }
    let mut cols: Vec<usize> = (0..m).collect();
    cols.shuffle(&mut seeded(seed));
    let mut kept = cols[..keep.min(m)].to_vec();
    kept.sort_unstable();
    factors.select_columns(&kept)
}

/// Dispatches on `generator`. `m` is ignored by the angle generators, which
/// fix their own layout, and `alpha` by the angle and hidden-factor ones.
pub fn generate(generator: Generator, m: usize, n: usize, alpha: f64, seed: u64) -> Result<SyntheticData> {
    match generator {
        Generator::NoiseMix => gen_noise_mix(m, n, alpha, seed),
        Generator::Rotation => gen_rotation(m, n, alpha, seed),
        Generator::Angles(mode) => gen_angles(n, mode, seed),
        Generator::Tangent => gen_tangent(m, n, alpha, seed),
        Generator::HiddenFactors(fraction) => {
            let base = gen_noise_mix(m, n, 0.0, seed)?;
            Ok(SyntheticData {
                factors: mask_factors(&base.factors, fraction, seed ^ 0x5eed)?,
                ..base
            })
        }
    }
}
