#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_twosource");

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("UTF-8 output")
}

/// Compares two CSV texts cell by cell: numeric cells within `tol`
/// (relative above magnitude 1), other cells exactly. Returns the first
/// mismatch.
pub fn compare_csv(actual: &str, expected: &str, tol: f64) -> Result<(), String> {
    let a: Vec<&str> = actual.lines().collect();
    let e: Vec<&str> = expected.lines().collect();
    if a.len() != e.len() {
        return Err(format!("{} rows, expected {}", a.len(), e.len()));
    }
    for (i, (ra, re)) in a.iter().zip(&e).enumerate() {
        let ca: Vec<&str> = ra.split(',').collect();
        let ce: Vec<&str> = re.split(',').collect();
        if ca.len() != ce.len() {
            return Err(format!("line {}: {} cells, expected {}", i + 1, ca.len(), ce.len()));
        }
        for (j, (x, y)) in ca.iter().zip(&ce).enumerate() {
            let same = match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) if u.is_finite() && v.is_finite() => (u - v).abs() <= tol * v.abs().max(1.0),
                _ => x == y,
            };
            if !same {
                return Err(format!("line {} column {}: {x} vs {y}", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

pub const GOLDEN: [&str; 4] = ["exponents", "conditional", "photons", "unconditional"];

/// Runs one figure command with its default (paper) parameters and checks
/// it against the stored reference. With `UPDATE_GOLDEN=1` the reference
/// is rewritten instead.
pub fn check_golden(command: &str) -> Result<(), String> {
    let actual = stdout_of(&[command]);
    let path = golden_dir().join(format!("{command}.csv"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    compare_csv(&actual, &expected, 1e-9).map_err(|e| format!("{command}: {e}"))
}
