//! Metrics computed from the factor-code mutual information matrix: MIG,
//! JEMMIG, MIG-sup, Modularity Score and DCIMIG.

use crate::data::{FactorMatrix, CodeMatrix, ImportanceMatrix, Matrix, MetricReport, Property};
use crate::discretize::DiscretizationConfig;
use crate::error::{Error, Result};
use crate::infotheory::InformationTable;

use super::top_two;

pub const MIG: &str = "mig";
pub const JEMMIG: &str = "jemmig";
pub const MIG_SUP: &str = "mig_sup";
pub const MODULARITY_SCORE: &str = "modularity_score";
pub const DCIMIG: &str = "dcimig";

fn check_entropies(mi: &ImportanceMatrix, h: &[f64]) -> Result<()> {
    if h.len() != mi.num_factors() {
        return Err(Error::DimensionMismatch {
            what: "factor entropies",
            expected: mi.num_factors(),
            found: h.len(),
        });
    }
    Ok(())
}

fn row(mi: &ImportanceMatrix, i: usize) -> Vec<f64> {
    mi.weights().row(i).to_vec()
}

fn column(mi: &ImportanceMatrix, j: usize) -> Vec<f64> {
    mi.weights().column(j)
}

/// Mutual information gap per factor, normalized by the factor's total MI
/// with all codes. Reported under the combined MIG-RMIG name since RMIG
/// reduces to it in code space.
pub fn mig(mi: &ImportanceMatrix, seed: u64) -> Result<MetricReport> {
    let mut per_factor = Vec::with_capacity(mi.num_factors());
    let mut dead = Vec::new();
    for i in 0..mi.num_factors() {
        let r = row(mi, i);
        let total: f64 = r.iter().sum();
        if total <= 0.0 {
            dead.push(i);
            per_factor.push(0.0);
            continue;
        }
        let (_, best, second) = top_two(&r);
        per_factor.push(((best - second) / total).clamp(0.0, 1.0));
    }
    let mut rep = MetricReport::from_factors(MIG, Property::Compactness, per_factor, seed);
    if !dead.is_empty() {
        rep = rep.with_warning(format!("factors {dead:?} share no information with any code"));
    }
    Ok(rep)
}

/// Normalized JEMMIG: `1 − (H(v_i, z⋆) − I(v_i, z⋆) + I(v_i, z∘)) / (H(v_i) + ln B_z)`.
pub fn jemmig(
    mi: &ImportanceMatrix,
    joint_entropies: &Matrix,
    factor_entropies: &[f64],
    num_code_bins: usize,
    seed: u64,
) -> Result<MetricReport> {
    check_entropies(mi, factor_entropies)?;
    if joint_entropies.nrows() != mi.num_factors() || joint_entropies.ncols() != mi.num_codes() {
        return Err(Error::DimensionMismatch {
            what: "joint entropy matrix",
            expected: mi.num_factors() * mi.num_codes(),
            found: joint_entropies.nrows() * joint_entropies.ncols(),
        });
    }
    if num_code_bins < 1 {
        return Err(Error::InvalidParameter("num_code_bins must be positive".into()));
    }
    let log_bins = (num_code_bins as f64).ln();
    let mut per_factor = Vec::with_capacity(mi.num_factors());
    let mut dead = Vec::new();
    for i in 0..mi.num_factors() {
        let r = row(mi, i);
        let denom = factor_entropies[i] + log_bins;
        if r.iter().sum::<f64>() <= 0.0 || denom <= 0.0 {
            dead.push(i);
            per_factor.push(0.0);
            continue;
        }
        let (star, best, second) = top_two(&r);
        let gap = joint_entropies.get(i, star) - best + second;
        per_factor.push((1.0 - gap / denom).clamp(0.0, 1.0));
    }
    let mut rep = MetricReport::from_factors(JEMMIG, Property::Holistic, per_factor, seed);
    if !dead.is_empty() {
        rep = rep.with_warning(format!("factors {dead:?} share no information with any code"));
    }
    Ok(rep)
}

/// Gap per code dimension between its two most informative factors, with MI
/// normalized by each factor's entropy.
pub fn mig_sup(mi: &ImportanceMatrix, factor_entropies: &[f64], seed: u64) -> Result<MetricReport> {
    check_entropies(mi, factor_entropies)?;
    let mut per_code = Vec::with_capacity(mi.num_codes());
    let mut dead = Vec::new();
    for j in 0..mi.num_codes() {
        let c: Vec<f64> = column(mi, j)
            .iter()
            .zip(factor_entropies)
            .map(|(&v, &h)| if h > 0.0 { v / h } else { 0.0 })
            .collect();
        let (_, best, second) = top_two(&c);
        if best <= 0.0 {
            dead.push(j);
        }
        per_code.push((best - second).clamp(0.0, 1.0));
    }
    let mut rep = MetricReport::from_codes(MIG_SUP, Property::Modularity, per_code, seed);
    if !dead.is_empty() {
        rep = rep.with_warning(format!(
            "codes {dead:?} carry no information about any measured factor; they score 0"
        ));
    }
    Ok(rep)
}

/// Per code, `1 − Σ_{i≠⋆} I(v_i, z_j)² / (I(v⋆, z_j)² · (M − 1))`.
pub fn modularity_score(mi: &ImportanceMatrix, seed: u64) -> Result<MetricReport> {
    let m = mi.num_factors();
    let mut per_code = Vec::with_capacity(mi.num_codes());
    let mut dead = Vec::new();
    for j in 0..mi.num_codes() {
        let c = column(mi, j);
        let (star, best, _) = top_two(&c);
        if best <= 0.0 {
            dead.push(j);
            per_code.push(0.0);
            continue;
        }
        if m == 1 {
            per_code.push(1.0);
            continue;
        }
        let rest: f64 = c
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != star)
            .map(|(_, v)| v * v)
            .sum();
        per_code.push(1.0 - rest / (best * best * (m - 1) as f64));
    }
    let mut rep = MetricReport::from_codes(MODULARITY_SCORE, Property::Modularity, per_code, seed);
    if !dead.is_empty() {
        rep = rep.with_warning(format!("codes {dead:?} have zero MI with every factor; they score 0"));
    }
    Ok(rep)
}

/// Each code's MI gap is credited to its most informative factor; a factor
/// keeps its best credited gap, and the sum is normalized by total factor
/// entropy.
pub fn dcimig(mi: &ImportanceMatrix, factor_entropies: &[f64], seed: u64) -> Result<MetricReport> {
    check_entropies(mi, factor_entropies)?;
    let total_h: f64 = factor_entropies.iter().sum();
    if total_h <= 0.0 {
        return Err(Error::ZeroEntropy);
    }
    let mut s = vec![0.0f64; mi.num_factors()];
    for j in 0..mi.num_codes() {
        let c = column(mi, j);
        let (star, best, second) = top_two(&c);
        s[star] = s[star].max(best - second);
    }
    // per-factor entries are S_i / H(v_i) weighted by H(v_i)
    let per_factor: Vec<f64> = s
        .iter()
        .zip(factor_entropies)
        .map(|(&si, &h)| if h > 0.0 { (si / h).clamp(0.0, 1.0) } else { 0.0 })
        .collect();
    let overall = (s.iter().sum::<f64>() / total_h).clamp(0.0, 1.0);
    let mut rep = MetricReport::scalar(DCIMIG, Property::Holistic, overall, seed);
    rep.per_factor = Some(per_factor);
    rep.aggregation = crate::data::Aggregation::FactorWeighted(factor_entropies.to_vec());
    Ok(rep)
}

/// All five information metrics on one shared MI estimate.
pub fn information_suite(table: &InformationTable, seed: u64) -> Result<Vec<MetricReport>> {
    Ok(vec![
        mig(&table.mi, seed)?,
        mig_sup(&table.mi, &table.factor_entropies, seed)?,
        jemmig(
            &table.mi,
            &table.joint_entropies,
            &table.factor_entropies,
            table.num_code_bins,
            seed,
        )?,
        modularity_score(&table.mi, seed)?,
        dcimig(&table.mi, &table.factor_entropies, seed)?,
    ])
}

/// Convenience wrapper: estimate the MI table and run the full suite.
pub fn score_information(
    factors: &FactorMatrix,
    codes: &CodeMatrix,
    config: &DiscretizationConfig,
    seed: u64,
) -> Result<Vec<MetricReport>> {
    let table = InformationTable::compute(factors, codes, config)?;
    information_suite(&table, seed)
}
