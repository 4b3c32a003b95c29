use std::fs;
use std::path::Path;
use std::process::Command;

use disentangle_core::analysis::kendall_tau;
use disentangle_core::synthgen::gen_noise_mix;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_disentangle"));
    c.env_remove("DISENTANGLE_OUT");
    c
}

fn write_identity(dir: &Path, n: usize) {
    let d = gen_noise_mix(4, n, 0.0, 11).unwrap();
    let mut f = String::from("v0,v1,v2,v3\n");
    let mut z = String::from("z0,z1,z2,z3\n");
    for r in 0..n {
        let row: Vec<String> = d.factors.values().row(r).iter().map(|v| v.to_string()).collect();
        f.push_str(&row.join(","));
        f.push('\n');
        let row: Vec<String> = d.codes.values().row(r).iter().map(|v| v.to_string()).collect();
        z.push_str(&row.join(","));
        z.push('\n');
    }
    fs::write(dir.join("factors.csv"), f).unwrap();
    fs::write(dir.join("codes.csv"), z).unwrap();
}

fn scores_csv(dir: &Path) -> Vec<(String, Option<f64>)> {
    let text = fs::read_to_string(dir.join("scores.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (cells[0].to_string(), cells[2].parse().ok())
        })
        .collect()
}

#[test]
fn identity_files_score_calibrated_metrics_high() {
    let dir = tempfile::tempdir().unwrap();
    write_identity(dir.path(), 5000);
    let out = dir.path().join("out");
    let status = bin()
        .args(["score", "--factors"])
        .arg(dir.path().join("factors.csv"))
        .arg("--codes")
        .arg(dir.path().join("codes.csv"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let scores = scores_csv(&out);
    assert_eq!(scores.len(), 17);
    for name in [
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
    ] {
        let v = scores.iter().find(|s| s.0 == name).unwrap().1.unwrap();
        assert!(v >= 0.95, "{name} = {v}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scores.json")).unwrap()).unwrap();
    assert!(report["wall_time_seconds"].as_f64().unwrap() > 0.0);
    assert_eq!(report["settings"]["code_bins"], 10);
}

#[test]
fn config_selecting_one_metric_reports_one_entry() {
    let dir = tempfile::tempdir().unwrap();
    write_identity(dir.path(), 500);
    fs::write(dir.path().join("cfg.json"), r#"{"metrics": ["mig"], "seeds": [1, 2]}"#).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .arg("score")
        .arg("--factors")
        .arg(dir.path().join("factors.csv"))
        .arg("--codes")
        .arg(dir.path().join("codes.csv"))
        .arg("--config")
        .arg(dir.path().join("cfg.json"))
        .env("DISENTANGLE_OUT", &out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let scores = scores_csv(&out);
    assert_eq!(scores.len(), 1);
    assert_eq!(scores[0].0, "mig");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scores.json")).unwrap()).unwrap();
    assert_eq!(report["columns"][0]["per_seed"].as_array().unwrap().len(), 2);
}

#[test]
fn mismatched_rows_exit_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.csv"), "a\n1\n2\n3\n").unwrap();
    fs::write(dir.path().join("c.csv"), "z\n1\n2\n").unwrap();
    let out = bin()
        .args(["score", "--factors"])
        .arg(dir.path().join("f.csv"))
        .arg("--codes")
        .arg(dir.path().join("c.csv"))
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dimension mismatch"), "{err}");
}

#[test]
fn parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.csv"), "a,b\n1,2\n3,oops\n").unwrap();
    fs::write(dir.path().join("c.csv"), "z\n1\n2\n").unwrap();
    let out = bin()
        .args(["score", "--factors"])
        .arg(dir.path().join("f.csv"))
        .arg("--codes")
        .arg(dir.path().join("c.csv"))
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("f.csv:3:"), "{err}");
}

#[test]
fn metric_failure_exits_2_and_keeps_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    // class 2 of the categorical factor has a single sample, so no pair can be formed
    let mut f = String::from("shape,size\n");
    let mut z = String::from("z0,z1\n");
    for r in 0..200 {
        let shape = if r == 0 { 2 } else { r % 2 };
        let size = (r % 10) as f64 / 10.0;
        f.push_str(&format!("{shape},{size}\n"));
        z.push_str(&format!("{},{}\n", shape as f64 + 0.01 * (r % 7) as f64, size));
    }
    fs::write(dir.path().join("f.csv"), f).unwrap();
    fs::write(dir.path().join("f.json"), r#"{"kinds": {"shape": "categorical"}}"#).unwrap();
    fs::write(dir.path().join("c.csv"), z).unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"metrics": ["z_diff", "mig"]}"#).unwrap();
    let out_dir = dir.path().join("o");
    let out = bin()
        .args(["score", "--factors"])
        .arg(dir.path().join("f.csv"))
        .arg("--codes")
        .arg(dir.path().join("c.csv"))
        .arg("--config")
        .arg(dir.path().join("cfg.json"))
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let scores = scores_csv(&out_dir);
    assert_eq!(scores[0], ("z_diff".to_string(), None));
    assert!(scores[1].1.is_some());
    let report = fs::read_to_string(out_dir.join("scores.json")).unwrap();
    assert!(report.contains("factor 0"), "{report}");
}

#[test]
fn unknown_metric_in_config_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    write_identity(dir.path(), 50);
    fs::write(dir.path().join("cfg.json"), r#"{"metrics": ["nope"]}"#).unwrap();
    let out = bin()
        .args(["score", "--factors"])
        .arg(dir.path().join("factors.csv"))
        .arg("--codes")
        .arg(dir.path().join("codes.csv"))
        .arg("--config")
        .arg(dir.path().join("cfg.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

/// Tau-b by direct pair counting.
fn brute_tau(a: &[f64], b: &[f64]) -> f64 {
    let (mut c, mut d, mut ta, mut tb, mut n0) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            n0 += 1.0;
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                ta += 1.0;
            }
            if db == 0.0 {
                tb += 1.0;
            }
            if da != 0.0 && db != 0.0 {
                if da.signum() == db.signum() {
                    c += 1.0;
                } else {
                    d += 1.0;
                }
            }
        }
    }
    (c - d) / f64::sqrt((n0 - ta) * (n0 - tb))
}

#[test]
fn compare_reproduces_sample_table_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let status = bin().arg("compare").arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let sample = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_scores.csv")).unwrap();
    let mut lines = sample.lines();
    let names: Vec<String> = lines.next().unwrap().split(',').skip(1).map(String::from).collect();
    let mut cols = vec![Vec::new(); names.len()];
    for l in lines {
        for (j, v) in l.split(',').skip(1).enumerate() {
            cols[j].push(v.parse::<f64>().unwrap());
        }
    }
    let got = fs::read_to_string(out.join("kendall.csv")).unwrap();
    let rows: Vec<Vec<i64>> = got
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), names.len());
    for i in 0..names.len() {
        for j in 0..names.len() {
            let want = (100.0 * brute_tau(&cols[i], &cols[j])).round() as i64;
            assert_eq!(rows[i][j], want, "{} vs {}", names[i], names[j]);
            let fast = (100.0 * kendall_tau(&cols[i], &cols[j]).unwrap()).round() as i64;
            assert_eq!(fast, want);
        }
    }
    assert!(out.join("kendall.svg").exists());
}

#[test]
fn compare_duplicated_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("t.csv"),
        "config,a,a_copy,b\nc1,0.1,0.1,0.3\nc2,0.4,0.4,0.1\nc3,0.2,0.2,0.2\n",
    )
    .unwrap();
    let out = dir.path().join("cmp");
    let status = bin()
        .args(["compare", "--format", "csv", "--table"])
        .arg(dir.path().join("t.csv"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(out.join("kendall.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "a,100,100,-100");
    assert!(!out.join("kendall.svg").exists());
}
