//! Controlled sweeps: one generator, a grid of settings, several seeds, and
//! every metric at each grid point.

use std::path::Path;
use std::time::Instant;

use disentangle_core::discretize::{bin_populations, discretize_codes, BinningSpec};
use disentangle_core::synthgen::{generate, AngleMode, Generator, SyntheticData};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Format, MetricSettings};
use crate::error::InputResult;
use crate::io::{ensure_dir, fmt6, write_csv, write_json, write_text};
use crate::registry::{columns_of, evaluate, Family, Metric, Outcome};
use crate::score::thread_pool;
use crate::summary::{round6, summarize, ColumnSummary};
use crate::svg::{LineChart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentName {
    Noise,
    Rotation,
    Angles,
    Tangent,
    Hidden,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Noise => "noise",
            ExperimentName::Rotation => "rotation",
            ExperimentName::Angles => "angles",
            ExperimentName::Tangent => "tangent",
            ExperimentName::Hidden => "hidden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// 5000 samples, 10 seeds.
    Desk,
    /// 20000 samples, 100 seeds.
    Paper,
}

impl Profile {
    pub fn num_samples(self) -> usize {
        match self {
            Profile::Desk => 5000,
            Profile::Paper => 20_000,
        }
    }

    pub fn num_seeds(self) -> usize {
        match self {
            Profile::Desk => 10,
            Profile::Paper => 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: String,
    /// Position on the chart's horizontal axis.
    pub x: f64,
    pub generator: Generator,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub num_samples: usize,
    pub num_factors: usize,
    pub seeds: Vec<u64>,
    pub x_label: String,
    pub points: Vec<GridPoint>,
}

fn alpha_grid(generator: Generator, values: &[f64]) -> Vec<GridPoint> {
    values
        .iter()
        .map(|&a| GridPoint {
            label: format!("{a:.1}"),
            x: a,
            generator,
            alpha: a,
        })
        .collect()
}

impl ExperimentSpec {
    /// The standard sweep for `name`: α ∈ {0, 0.2, …, 1}, measured fractions
    /// {1/8, …, 8/8} for hidden factors, and the three encodings for angles.
    pub fn standard(name: ExperimentName, profile: Profile, base_seed: u64) -> Self {
        let alphas: Vec<f64> = (0..=5).map(|k| k as f64 / 5.0).collect();
        let (x_label, points) = match name {
            ExperimentName::Noise => ("alpha", alpha_grid(Generator::NoiseMix, &alphas)),
            ExperimentName::Rotation => ("alpha", alpha_grid(Generator::Rotation, &alphas)),
            ExperimentName::Tangent => ("alpha", alpha_grid(Generator::Tangent, &alphas)),
            ExperimentName::Angles => (
                "encoding",
                [
                    ("trig", AngleMode::Trig),
                    ("redundant2", AngleMode::Redundant(2)),
                    ("redundant4", AngleMode::Redundant(4)),
                ]
                .into_iter()
                .enumerate()
                .map(|(i, (label, mode))| GridPoint {
                    label: label.into(),
                    x: i as f64,
                    generator: Generator::Angles(mode),
                    alpha: 0.0,
                })
                .collect(),
            ),
            ExperimentName::Hidden => (
                "fraction of factors measured",
                (1..=8)
                    .map(|k| {
                        let f = k as f64 / 8.0;
                        GridPoint {
                            label: format!("{k}/8"),
                            x: f,
                            generator: Generator::HiddenFactors(f),
                            alpha: 0.0,
                        }
                    })
                    .collect(),
            ),
        };
        Self {
            name,
            num_samples: profile.num_samples(),
            num_factors: 8,
            seeds: (0..profile.num_seeds() as u64).map(|k| base_seed + k).collect(),
            x_label: x_label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub label: String,
    pub x: f64,
    pub columns: Vec<ColumnSummary>,
    /// Fraction of code samples per bin, averaged over code dimensions and
    /// seeds. Only recorded for the tangent sweep.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bin_fractions: Option<Vec<f64>>,
}

impl PointResult {
    pub fn column(&self, name: &str) -> Option<&ColumnSummary> {
        self.columns.iter().find(|c| c.column == name)
    }

    pub fn mean(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub metrics: Vec<String>,
    pub settings: MetricSettings,
    pub points: Vec<PointResult>,
}

impl ExperimentResult {
    pub fn failures(&self) -> usize {
        self.points
            .iter()
            .flat_map(|p| &p.columns)
            .filter(|c| c.failed())
            .count()
    }
}

/// Wall-clock figures, kept apart from the results so those stay
/// reproducible byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    /// Summed evaluation time per grid point, across workers.
    pub point_seconds: Vec<(String, f64)>,
}

struct Task {
    outcomes: Vec<Outcome>,
    bins: Option<Vec<f64>>,
    seconds: f64,
}

fn code_bin_fractions(data: &SyntheticData, bins: usize) -> Option<Vec<f64>> {
    let binned = discretize_codes(&data.codes, &BinningSpec::empirical(bins)).ok()?;
    let n = data.codes.num_samples() as f64;
    let mut acc = vec![0.0; bins];
    for col in &binned {
        let pop = bin_populations(&col.bins, col.num_bins).ok()?;
        for (a, p) in acc.iter_mut().zip(pop) {
            *a += p as f64 / n / binned.len() as f64;
        }
    }
    Some(acc)
}

fn run_task(spec: &ExperimentSpec, point: &GridPoint, seed: u64, metrics: &[Metric], settings: &MetricSettings) -> Task {
    let start = Instant::now();
    let data = generate(point.generator, spec.num_factors, spec.num_samples, point.alpha, seed);
    let (outcomes, bins) = match data {
        Ok(d) => {
            let bins = (spec.name == ExperimentName::Tangent)
                .then(|| code_bin_fractions(&d, settings.code_bins))
                .flatten();
            (evaluate(metrics, &d.factors, &d.codes, d.factor_binning, settings, seed), bins)
        }
        Err(e) => (
            metrics
                .iter()
                .map(|&metric| Outcome {
                    metric,
                    result: Err(format!("data generation failed: {e}")),
                })
                .collect(),
            None,
        ),
    };
    Task {
        outcomes,
        bins,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_experiment(
    spec: &ExperimentSpec,
    metrics: &[Metric],
    settings: &MetricSettings,
    jobs: usize,
) -> InputResult<(ExperimentResult, Timing)> {
    let start = Instant::now();
    let tasks: Vec<(usize, u64)> = (0..spec.points.len())
        .flat_map(|p| spec.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let done: Vec<Task> = thread_pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(p, s)| run_task(spec, &spec.points[p], s, metrics, settings))
            .collect()
    });

    let columns = columns_of(metrics);
    let mut points = Vec::with_capacity(spec.points.len());
    let mut point_seconds = Vec::with_capacity(spec.points.len());
    let per_point = spec.seeds.len();
    for (p, chunk) in done.chunks(per_point).enumerate() {
        let runs: Vec<(u64, Vec<Outcome>)> = spec
            .seeds
            .iter()
            .zip(chunk)
            .map(|(&s, t)| (s, t.outcomes.clone()))
            .collect();
        let bins: Vec<&Vec<f64>> = chunk.iter().filter_map(|t| t.bins.as_ref()).collect();
        let bin_fractions = (!bins.is_empty()).then(|| {
            (0..bins[0].len())
                .map(|b| round6(bins.iter().map(|v| v[b]).sum::<f64>() / bins.len() as f64))
                .collect()
        });
        let point = &spec.points[p];
        points.push(PointResult {
            label: point.label.clone(),
            x: point.x,
            columns: summarize(&columns, &runs),
            bin_fractions,
        });
        point_seconds.push((point.label.clone(), chunk.iter().map(|t| t.seconds).sum()));
    }
    let result = ExperimentResult {
        spec: spec.clone(),
        metrics: metrics.iter().map(|m| m.name().to_string()).collect(),
        settings: settings.clone(),
        points,
    };
    let timing = Timing {
        total_seconds: start.elapsed().as_secs_f64(),
        point_seconds,
    };
    Ok((result, timing))
}

fn opt6(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

pub fn write_experiment(result: &ExperimentResult, timing: &Timing, out: &Path, formats: &[Format]) -> InputResult<()> {
    ensure_dir(out)?;
    let columns: Vec<&str> = result
        .points
        .first()
        .map(|p| p.columns.iter().map(|c| c.column.as_str()).collect())
        .unwrap_or_default();

    if formats.contains(&Format::Csv) {
        let mut header = vec!["point", "x"];
        header.extend(&columns);
        let rows: Vec<Vec<String>> = result
            .points
            .iter()
            .map(|p| {
                let mut row = vec![p.label.clone(), fmt6(p.x)];
                row.extend(p.columns.iter().map(|c| opt6(c.mean)));
                row
            })
            .collect();
        write_csv(&out.join("summary.csv"), &header, &rows)?;

        let curves = out.join("curves");
        ensure_dir(&curves)?;
        for (k, col) in columns.iter().enumerate() {
            let rows: Vec<Vec<String>> = result
                .points
                .iter()
                .map(|p| {
                    let c = &p.columns[k];
                    vec![
                        p.label.clone(),
                        fmt6(p.x),
                        opt6(c.mean),
                        opt6(c.std),
                        opt6(c.min),
                        opt6(c.max),
                        c.count.to_string(),
                    ]
                })
                .collect();
            write_csv(
                &curves.join(format!("{col}.csv")),
                &["point", "x", "mean", "std", "min", "max", "count"],
                &rows,
            )?;
        }
        if result.points.iter().any(|p| p.bin_fractions.is_some()) {
            let nb = result.settings.code_bins;
            let bin_names: Vec<String> = (0..nb).map(|b| format!("bin{b}")).collect();
            let mut header = vec!["point", "x"];
            header.extend(bin_names.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = result
                .points
                .iter()
                .filter_map(|p| {
                    p.bin_fractions.as_ref().map(|f| {
                        let mut row = vec![p.label.clone(), fmt6(p.x)];
                        row.extend(f.iter().map(|v| fmt6(*v)));
                        row
                    })
                })
                .collect();
            write_csv(&out.join("bins.csv"), &header, &rows)?;
        }
    }
    if formats.contains(&Format::Json) {
        write_json(&out.join("experiment.json"), result)?;
    }
    if formats.contains(&Format::Svg) {
        let ticks: Vec<(f64, String)> = result.points.iter().map(|p| (p.x, p.label.clone())).collect();
        for family in Family::ALL {
            let series: Vec<Series> = columns
                .iter()
                .enumerate()
                .filter(|(_, c)| Metric::ALL.iter().any(|m| m.family() == family && m.columns().contains(c)))
                .map(|(k, c)| Series {
                    name: c.to_string(),
                    points: result.points.iter().map(|p| (p.x, p.columns[k].mean)).collect(),
                })
                .collect();
            if series.is_empty() {
                continue;
            }
            let title = format!("{} experiment: {} metrics", result.spec.name.as_str(), family.name());
            let chart = LineChart {
                title: &title,
                x_label: &result.spec.x_label,
                y_label: "score",
                x_ticks: ticks.clone(),
                y_range: (0.0, 1.0),
                series,
            };
            write_text(&out.join(format!("{}.svg", family.name())), &chart.render())?;
        }
        let with_bins: Vec<&PointResult> = result.points.iter().filter(|p| p.bin_fractions.is_some()).collect();
        if !with_bins.is_empty() {
            let nb = result.settings.code_bins;
            let top = with_bins
                .iter()
                .flat_map(|p| p.bin_fractions.iter().flatten())
                .fold(0.0f64, |a, &b| a.max(b));
            let chart = LineChart {
                title: "code samples per bin",
                x_label: "bin",
                y_label: "fraction of samples",
                x_ticks: (0..nb).map(|b| (b as f64, b.to_string())).collect(),
                y_range: (0.0, (top * 1.1).max(0.1)),
                series: with_bins
                    .iter()
                    .map(|p| Series {
                        name: format!("alpha {}", p.label),
                        points: p
                            .bin_fractions
                            .as_ref()
                            .expect("filtered")
                            .iter()
                            .enumerate()
                            .map(|(b, v)| (b as f64, Some(*v)))
                            .collect(),
                    })
                    .collect(),
            };
            write_text(&out.join("bins.svg"), &chart.render())?;
        }
    }
    write_json(&out.join("timing.json"), timing)
}
