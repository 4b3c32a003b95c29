//! Headered CSV input for factors and codes, and the factor-kind sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use disentangle_core::{CodeMatrix, FactorKind, FactorMatrix, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{InputError, InputResult};

/// Declares which factor columns are categorical. Unlisted columns are
/// continuous.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSidecar {
    pub kinds: BTreeMap<String, FactorKind>,
}

/// Default sidecar location: the factors file with a `.json` extension.
pub fn sidecar_path(factors: &Path) -> PathBuf {
    factors.with_extension("json")
}

/// Column names plus row-major values. Line numbers in errors are 1-based
/// and count the header.
pub fn read_table(path: &Path) -> InputResult<(Vec<String>, Matrix)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(InputError::parse(path, 1, "missing header row"));
    }
    if let Some(dup) = names.iter().enumerate().find(|(i, n)| names[..*i].contains(n)) {
        return Err(InputError::parse(path, 1, format!("duplicate column '{}'", dup.1)));
    }
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                InputError::parse(path, line, format!("column '{}': '{field}' is not a number", names[j]))
            })?;
            if !v.is_finite() {
                return Err(InputError::parse(path, line, format!("column '{}': non-finite value", names[j])));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(InputError::parse(path, 2, "no data rows"));
    }
    let m = Matrix::new(rows, names.len(), values)?;
    Ok((names, m))
}

fn csv_error(path: &Path, e: csv::Error) -> InputError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => InputError::io(path, io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            InputError::parse(path, line, format!("expected {expected_len} fields, found {len}"))
        }
        other => InputError::parse(path, line, format!("{other:?}")),
    }
}

pub fn read_sidecar(path: &Path) -> InputResult<FactorSidecar> {
    let text = fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| InputError::parse(path, e.line() as u64, e.to_string()))
}

/// Reads factors; `sidecar` overrides the default sidecar location, which is
/// optional.
pub fn read_factors(path: &Path, sidecar: Option<&Path>) -> InputResult<FactorMatrix> {
    let (names, values) = read_table(path)?;
    let side = match sidecar {
        Some(p) => read_sidecar(p)?,
        None => {
            let p = sidecar_path(path);
            if p.exists() {
                read_sidecar(&p)?
            } else {
                FactorSidecar::default()
            }
        }
    };
    if let Some(unknown) = side.kinds.keys().find(|k| !names.contains(k)) {
        return Err(InputError::Config(format!(
            "sidecar names factor '{unknown}', which is not a column of {}",
            path.display()
        )));
    }
    let kinds: Vec<FactorKind> = names
        .iter()
        .map(|n| side.kinds.get(n).copied().unwrap_or(FactorKind::Continuous))
        .collect();
    for (c, kind) in kinds.iter().enumerate() {
        if *kind != FactorKind::Categorical {
            continue;
        }
        for r in 0..values.nrows() {
            let v = values.get(r, c);
            if v < 0.0 || v.fract() != 0.0 {
                return Err(InputError::parse(
                    path,
                    r as u64 + 2,
                    format!("categorical factor '{}' needs a non-negative integer, got {v}", names[c]),
                ));
            }
        }
    }
    Ok(FactorMatrix::new(values, names, kinds)?)
}

pub fn read_codes(path: &Path) -> InputResult<CodeMatrix> {
    let (names, values) = read_table(path)?;
    Ok(CodeMatrix::new(values, names)?)
}

/// Writes a headered CSV of pre-formatted cells.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> InputResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| InputError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> InputResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| InputError::Config(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> InputResult<()> {
    fs::write(path, text).map_err(|e| InputError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> InputResult<()> {
    fs::create_dir_all(path).map_err(|e| InputError::io(path, e))
}

/// Fixed six-decimal rendering so repeated runs produce identical bytes.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str, body: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        (dir, p)
    }

    #[test]
    fn reads_headered_table() {
        let (_d, p) = tmp("f.csv", "a,b\n1,2\n3,4.5\n");
        let (names, m) = read_table(&p).unwrap();
        assert_eq!(names, vec!["a", "b"]);
        assert_eq!(m.row(1), &[3.0, 4.5]);
    }

    #[test]
    fn bad_cell_reports_line() {
        let (_d, p) = tmp("f.csv", "a,b\n1,2\n3,x\n");
        let e = read_table(&p).unwrap_err().to_string();
        assert!(e.contains(":3:"), "{e}");
        let (_d, p) = tmp("f.csv", "a,b\n1,2\n3\n");
        let e = read_table(&p).unwrap_err().to_string();
        assert!(e.contains(":3:") && e.contains("expected 2 fields"), "{e}");
    }

    #[test]
    fn sidecar_marks_categorical() {
        let (d, p) = tmp("f.csv", "shape,size\n0,0.5\n2,0.1\n");
        fs::write(d.path().join("f.json"), r#"{"kinds": {"shape": "categorical"}}"#).unwrap();
        let f = read_factors(&p, None).unwrap();
        assert_eq!(f.kinds(), &[FactorKind::Categorical, FactorKind::Continuous]);
        fs::write(d.path().join("f.json"), r#"{"kinds": {"size": "categorical"}}"#).unwrap();
        let e = read_factors(&p, None).unwrap_err().to_string();
        assert!(e.contains(":2:"), "{e}");
    }

    #[test]
    fn negative_zero_prints_plainly() {
        assert_eq!(fmt6(-0.0), "0.000000");
        assert_eq!(fmt6(-1e-9), "0.000000");
        assert_eq!(fmt6(0.5), "0.500000");
    }
}
