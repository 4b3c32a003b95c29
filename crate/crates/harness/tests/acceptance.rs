//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion with
//! the individual checks underneath, then exits non-zero if any check fails
//! that is not a documented deviation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use disentangle_core::analysis::kendall_tau;
use disentangle_core::infotheory::{entropy, joint_entropy, mutual_information, JointHistogram};
use disentangle_core::predictors::{fit_lasso, roc_auc, LassoParams};
use disentangle_core::synthgen::Generator;
use disentangle_core::Matrix;
use disentangle_harness::config::MetricSettings;
use disentangle_harness::experiment::{
    run_experiment, ExperimentName, ExperimentResult, ExperimentSpec, GridPoint, PointResult, Profile,
};
use disentangle_harness::registry::{Metric, COLUMNS};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Checks that fail for reasons analysed in the project's decision notes.
/// They are still reported as FAIL; they just do not fail the run.
const KNOWN_DEVIATIONS: &[&str] = &["2.modularity_score_noise>0.5", "4.trig.dci_lasso_modularity"];

struct Check {
    id: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, id: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            id: id.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn at_least(&mut self, id: String, value: Option<f64>, bound: f64) {
        let pass = value.is_some_and(|v| v >= bound);
        self.check(id, pass, format!("{} >= {bound}", show(value)));
    }

    fn at_most(&mut self, id: String, value: Option<f64>, bound: f64) {
        let pass = value.is_some_and(|v| v <= bound);
        self.check(id, pass, format!("{} <= {bound}", show(value)));
    }
}

fn show(v: Option<f64>) -> String {
    v.map_or("missing".into(), |v| format!("{v:.4}"))
}

fn point<'a>(r: &'a ExperimentResult, label: &str) -> &'a PointResult {
    r.points.iter().find(|p| p.label == label).expect("grid point present")
}

fn desk_spec(name: ExperimentName, points: Vec<GridPoint>) -> ExperimentSpec {
    ExperimentSpec {
        points,
        ..ExperimentSpec::standard(name, Profile::Desk, 0)
    }
}

fn alpha_points(generator: Generator, alphas: &[f64]) -> Vec<GridPoint> {
    alphas
        .iter()
        .map(|&a| GridPoint {
            label: format!("{a:.1}"),
            x: a,
            generator,
            alpha: a,
        })
        .collect()
}

fn run(spec: &ExperimentSpec, metrics: &[Metric]) -> ExperimentResult {
    run_experiment(spec, metrics, &MetricSettings::default(), 1)
        .expect("experiment runs")
        .0
}

/// Runs the CLI noise sweep twice and compares every CSV/JSON/SVG output.
fn determinism(dir: &Path) -> (Criterion, ExperimentResult) {
    let mut c = Criterion::default();
    let run_once = |name: &str| {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_disentangle"))
            .args(["experiment", "--name", "noise", "--profile", "desk", "--seed", "7", "--out"])
            .arg(&out)
            .status()
            .expect("binary runs");
        (out, status.code())
    };
    let (a, code_a) = run_once("a");
    let (b, code_b) = run_once("b");
    c.check("8.exit_codes", code_a == Some(0) && code_b == Some(0), format!("{code_a:?}, {code_b:?}"));

    let mut files = Vec::new();
    let mut stack = vec![a.clone()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timing.json" {
                files.push(p.strip_prefix(&a).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    let differing: Vec<String> = files
        .iter()
        .filter(|f| fs::read(a.join(f)).ok() != fs::read(b.join(f)).ok())
        .map(|f| f.display().to_string())
        .collect();
    let has = |ext: &str| files.iter().any(|f| f.extension().is_some_and(|e| e == ext));
    c.check(
        "8.byte_identical",
        differing.is_empty() && has("csv") && has("json"),
        format!("{} files compared, differing: {differing:?}", files.len()),
    );
    let result: ExperimentResult =
        serde_json::from_str(&fs::read_to_string(a.join("experiment.json")).unwrap()).unwrap();
    (c, result)
}

const CALIBRATED: [&str; 10] = [
    "z_diff",
    "z_min_var",
    "dci_rf_modularity",
    "dci_rf_compactness",
    "dci_rf_explicitness",
    "sap",
    "mig",
    "mig_sup",
    "jemmig",
    "dcimig",
];

fn calibration(noise: &ExperimentResult) -> Criterion {
    let mut c = Criterion::default();
    let (p0, p1) = (point(noise, "0.0"), point(noise, "1.0"));
    for m in CALIBRATED {
        c.at_least(format!("1.{m}@0"), p0.mean(m), 0.95 - 0.05);
        c.at_most(format!("1.{m}@1"), p1.mean(m), 0.10 + 0.05);
    }
    c
}

fn miscalibrations(noise: &ExperimentResult) -> Criterion {
    let mut c = Criterion::default();
    let (p0, p1) = (point(noise, "0.0"), point(noise, "1.0"));
    for m in ["dci_lasso_modularity", "dci_lasso_compactness"] {
        let v = p1.mean(m);
        c.check(format!("2.{m}_noise>0.3"), v.is_some_and(|v| v > 0.3), show(v));
    }
    let v = p0.mean("z_max_var");
    c.check("2.z_max_var@0<1", v.is_some_and(|v| v < 1.0), show(v));
    let v = p1.mean("z_max_var");
    c.check("2.z_max_var@1>0", v.is_some_and(|v| v > 0.0), show(v));
    let v = p0.mean("irs");
    c.check("2.irs@0<1", v.is_some_and(|v| v < 1.0), show(v));
    let v = p1.mean("modularity_score");
    c.check("2.modularity_score_noise>0.5", v.is_some_and(|v| v > 0.5), show(v));
    c
}

fn rotation() -> Criterion {
    let mut c = Criterion::default();
    let alphas = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let spec = desk_spec(ExperimentName::Rotation, alpha_points(Generator::Rotation, &alphas));
    let r = run(&spec, &[Metric::ZDiff, Metric::DciRf, Metric::Sap, Metric::Mig]);
    let half = point(&r, "0.5");
    let z = half.mean("z_diff");
    c.check("3.z_diff@0.5", z.is_some_and(|v| (v - 1.0).abs() <= 0.02), show(z));
    c.at_most("3.mig@0.5".into(), half.mean("mig"), 0.05);
    c.at_most("3.sap@0.5".into(), half.mean("sap"), 0.05);
    for m in ["dci_rf_modularity", "dci_rf_compactness"] {
        let curve: Vec<Option<f64>> = r.points.iter().map(|p| p.mean(m)).collect();
        let decreasing = curve
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a + 0.02));
        let text: Vec<String> = curve.iter().map(|v| show(*v)).collect();
        c.check(format!("3.{m}_decreasing"), decreasing, text.join(" > "));
    }
    c
}

fn table1() -> Criterion {
    const EXPECTED: [(&str, [f64; 17]); 3] = [
        (
            "trig",
            [1.0, 1.0, 1.0, 0.8, 0.8, 1.0, 0.6, 1.0, 0.7, 1.0, 1.0, 0.6, 0.0, 0.7, 0.4, 1.0, 0.6],
        ),
        (
            "redundant2",
            [1.0, 1.0, 1.0, 0.9, 1.0, 1.0, 1.0, 1.0, 0.7, 1.0, 1.0, 0.0, 0.0, 1.0, 0.5, 1.0, 1.0],
        ),
        (
            "redundant4",
            [1.0, 1.0, 1.0, 0.9, 1.0, 1.0, 1.0, 1.0, 0.4, 1.0, 1.0, 0.0, 0.0, 1.0, 0.5, 1.0, 1.0],
        ),
    ];
    let mut c = Criterion::default();
    let spec = ExperimentSpec::standard(ExperimentName::Angles, Profile::Desk, 0);
    let r = run(&spec, &Metric::ALL);
    for (row, want) in EXPECTED {
        let p = point(&r, row);
        for (col, w) in COLUMNS.iter().zip(want) {
            let got = p.mean(col);
            let pass = got.is_some_and(|g| (g - w).abs() <= 0.1);
            c.check(format!("4.{row}.{col}"), pass, format!("{} vs {w}", show(got)));
        }
    }
    c
}

fn tangent() -> Criterion {
    let mut c = Criterion::default();
    let spec = desk_spec(ExperimentName::Tangent, alpha_points(Generator::Tangent, &[0.0, 1.0]));
    let r = run(&spec, &[Metric::DciLasso, Metric::DciRf, Metric::Sap]);
    let (p0, p1) = (point(&r, "0.0"), point(&r, "1.0"));
    for m in ["dci_lasso_explicitness", "sap"] {
        let (a, b) = (p0.mean(m), p1.mean(m));
        let drop = a.zip(b).map(|(a, b)| a - b);
        c.check(
            format!("5.{m}_drop>=0.3"),
            drop.is_some_and(|d| d >= 0.3),
            format!("{} -> {}", show(a), show(b)),
        );
    }
    for (label, p) in [("0", p0), ("1", p1)] {
        c.at_least(format!("5.dci_rf_explicitness@{label}"), p.mean("dci_rf_explicitness"), 0.9);
    }
    let bins = p1.bin_fractions.as_ref().expect("tangent records bins");
    let mid = bins.len() / 2;
    let centre = bins[mid - 1] + bins[mid];
    c.check("5.centre_bins>50%", centre > 0.5, format!("{centre:.4} of samples"));
    c
}

fn hidden() -> Criterion {
    let mut c = Criterion::default();
    let spec = desk_spec(
        ExperimentName::Hidden,
        vec![GridPoint {
            label: "4/8".into(),
            x: 0.5,
            generator: Generator::HiddenFactors(0.5),
            alpha: 0.0,
        }],
    );
    let metrics: Vec<Metric> = Metric::ALL.into_iter().filter(|m| *m != Metric::DciLasso).collect();
    let r = run(&spec, &metrics);
    let p = &r.points[0];
    for m in [
        "z_diff",
        "z_min_var",
        "dci_rf_modularity",
        "dci_rf_compactness",
        "dci_rf_explicitness",
        "sap",
        "mig",
        "jemmig",
        "dcimig",
        "explicitness_score",
    ] {
        c.at_least(format!("6.{m}"), p.mean(m), 0.9);
    }
    for m in ["mig_sup", "modularity_score", "irs", "z_max_var"] {
        let v = p.mean(m);
        c.check(format!("6.{m}<0.9"), v.is_some_and(|v| v < 0.9), show(v));
    }
    c
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn table_4x4() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0usize..50, 4), 4)
        .prop_filter("non-empty", |t| t.iter().flatten().sum::<usize>() > 0)
}

fn oracles() -> Criterion {
    let mut c = Criterion::default();

    let r = runner(1000).run(&table_4x4(), |t| {
        let h = JointHistogram::from_table(&t).unwrap();
        let n: f64 = t.iter().flatten().sum::<usize>() as f64;
        let rows: Vec<f64> = t.iter().map(|r| r.iter().sum::<usize>() as f64).collect();
        let cols: Vec<f64> = (0..4).map(|j| t.iter().map(|r| r[j]).sum::<usize>() as f64).collect();
        let mut brute = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let p = t[i][j] as f64 / n;
                if p > 0.0 {
                    brute += p * (p / (rows[i] / n * cols[j] / n)).ln();
                }
            }
        }
        prop_assert!((mutual_information(&h).unwrap() - brute).abs() < 1e-10);
        Ok(())
    });
    c.check("7.mi_brute_force_4x4", r.is_ok(), format!("{r:?}"));

    let r = runner(1000).run(&table_4x4(), |t| {
        let h = JointHistogram::from_table(&t).unwrap();
        let hx = entropy(&h.row_marginal()).unwrap();
        let hy = entropy(&h.col_marginal()).unwrap();
        let mi = mutual_information(&h).unwrap();
        prop_assert!((joint_entropy(&h).unwrap() - (hx + hy - mi)).abs() < 1e-10);
        Ok(())
    });
    c.check("7.entropy_identity_1000", r.is_ok(), format!("{r:?}"));

    let perms = (2usize..=50).prop_flat_map(|k| {
        (
            Just((0..k).map(|i| i as f64).collect::<Vec<f64>>()).prop_shuffle(),
            Just((0..k).map(|i| i as f64).collect::<Vec<f64>>()).prop_shuffle(),
        )
    });
    let r = runner(1000).run(&perms, |(a, b)| {
        let (mut conc, mut disc) = (0.0, 0.0);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if (a[i] - a[j]) * (b[i] - b[j]) > 0.0 {
                    conc += 1.0;
                } else {
                    disc += 1.0;
                }
            }
        }
        let brute = (conc - disc) / (conc + disc);
        prop_assert!((kendall_tau(&a, &b).unwrap() - brute).abs() < 1e-12);
        Ok(())
    });
    c.check("7.kendall_pair_counting", r.is_ok(), format!("{r:?}"));

    let lasso_case = (
        prop::collection::vec(-5.0f64..5.0, 5..60),
        prop::collection::vec(-1.0f64..1.0, 60),
        -3.0f64..3.0,
        0.0f64..2.0,
    );
    let r = runner(1000).run(&lasso_case, |(raw, noise, slope, lambda)| {
        let n = raw.len() as f64;
        let mu = raw.iter().sum::<f64>() / n;
        let sd = (raw.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n).sqrt();
        if sd < 1e-3 {
            return Ok(());
        }
        let x: Vec<f64> = raw.iter().map(|v| (v - mu) / sd).collect();
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, e)| slope * a + e).collect();
        let m = fit_lasso(
            &Matrix::new(x.len(), 1, x.clone()).unwrap(),
            &y,
            &LassoParams {
                lambda,
                tol: 1e-12,
                max_sweeps: 100,
                standardize: false,
            },
        )
        .unwrap();
        let xy = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / n;
        let xx = x.iter().map(|a| a * a).sum::<f64>() / n;
        let closed = xy.signum() * (xy.abs() - lambda).max(0.0) / xx;
        prop_assert!((m.weights[0] - closed).abs() < 1e-6);
        Ok(())
    });
    c.check("7.lasso_closed_form", r.is_ok(), format!("{r:?}"));

    let auc_case = prop::collection::vec((0u8..20, any::<bool>()), 2..80)
        .prop_filter("both classes", |v| v.iter().any(|p| p.1) && v.iter().any(|p| !p.1));
    let r = runner(1000).run(&auc_case, |v| {
        let scores: Vec<f64> = v.iter().map(|p| f64::from(p.0)).collect();
        let labels: Vec<bool> = v.iter().map(|p| p.1).collect();
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in 0..v.len() {
            for j in 0..v.len() {
                if labels[i] && !labels[j] {
                    pairs += 1.0;
                    wins += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        prop_assert!((roc_auc(&scores, &labels).unwrap() - wins / pairs).abs() < 1e-12);
        Ok(())
    });
    c.check("7.auc_pair_counting", r.is_ok(), format!("{r:?}"));
    c
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results: BTreeMap<u32, (&str, Criterion)> = BTreeMap::new();

    results.insert(7, ("oracle equivalence", oracles()));
    let (det, noise) = determinism(dir.path());
    results.insert(1, ("calibration", calibration(&noise)));
    results.insert(2, ("documented miscalibrations", miscalibrations(&noise)));
    results.insert(8, ("determinism", det));
    results.insert(3, ("rotation", rotation()));
    results.insert(4, ("angle encodings", table1()));
    results.insert(5, ("tangent nonlinearity", tangent()));
    results.insert(6, ("hidden factors", hidden()));

    let mut unexpected = 0;
    for (n, (title, c)) in &results {
        let failed: Vec<&Check> = c.checks.iter().filter(|k| !k.pass).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {n} ({title}): {}/{} checks", c.checks.len() - failed.len(), c.checks.len());
        for k in &c.checks {
            let tag = match (k.pass, KNOWN_DEVIATIONS.contains(&k.id.as_str())) {
                (true, _) => "ok  ",
                (false, true) => "FAIL (known deviation)",
                (false, false) => {
                    unexpected += 1;
                    "FAIL"
                }
            };
            println!("    {tag} {}: {}", k.id, k.detail);
        }
    }
    if unexpected > 0 {
        println!("{unexpected} check(s) failed outside the documented deviations");
        std::process::exit(1);
    }
}
