//! Acceptance criteria 1–10, one test each. Every test prints a single
//! `criterion N PASS|FAIL ...` line to the real standard output.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use multitime::validation::{run_criterion, CriterionReport};

fn announce(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn check(id: u8) {
    let report: CriterionReport = match run_criterion(id) {
        Ok(r) => r,
        Err(e) => {
            announce(&format!("criterion {id:>2} FAIL: error {e}"));
            panic!("criterion {id} errored: {e}");
        }
    };
    announce(&report.to_string());
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_01_duality_and_unitality() {
    check(1);
}

#[test]
fn criterion_02_decomposition_identity() {
    check(2);
}

#[test]
fn criterion_03_qrt_reduction() {
    check(3);
}

#[test]
fn criterion_04_grouping_self_consistency() {
    check(4);
}

#[test]
fn criterion_05_generator_brute_force() {
    check(5);
}

#[test]
fn criterion_06_closed_system_exactness() {
    check(6);
}

#[test]
fn criterion_07_analytic_damped_qubit() {
    check(7);
}

#[test]
fn criterion_08_finite_bath_born_markov() {
    check(8);
}

#[test]
fn criterion_09_integrator_cross_check() {
    check(9);
}

const GOLDEN: [(&str, &str); 7] = [
    ("damped_qubit_corr.json", "damped_qubit_corr.csv"),
    ("damped_qubit_decompose.json", "damped_qubit_decompose.csv"),
    ("thermal_qubit_steady.json", "thermal_qubit_steady.csv"),
    ("oscillator_evolve.json", "oscillator_evolve.csv"),
    ("dimer_otoc.json", "dimer_otoc.csv"),
    ("explicit_local_group.json", "explicit_local_group.csv"),
    ("qubit_general_corr.json", "qubit_general_corr.json"),
];

#[test]
fn criterion_10_cli_determinism() {
    let start = Instant::now();
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let bin = env!("CARGO_BIN_EXE_multitime");
    let dir = tempfile::tempdir().unwrap();

    let mut mismatched = Vec::new();
    for (config, fixture) in GOLDEN {
        let out = dir.path().join(fixture);
        let status = Command::new(bin)
            .arg("--config")
            .arg(root.join("configs").join(config))
            .arg("--out")
            .arg(&out)
            .status()
            .expect("binary runs");
        let expected = std::fs::read(root.join("tests/fixtures").join(fixture)).unwrap();
        if !status.success() || std::fs::read(&out).ok() != Some(expected) {
            mismatched.push(fixture);
        }
    }

    let validate = Command::new(bin)
        .arg("--config")
        .arg(root.join("configs/validate.json"))
        .arg("--out")
        .arg(dir.path().join("validate.csv"))
        .output()
        .expect("binary runs");
    let code = validate.status.code();
    let failing: Vec<String> = String::from_utf8_lossy(&validate.stderr)
        .lines()
        .filter(|l| l.contains(" FAIL "))
        .map(|l| l.split(':').next().unwrap_or(l).trim().to_string())
        .collect();

    let elapsed = start.elapsed();
    let budget = Duration::from_secs(120);
    let passed = code == Some(0) && mismatched.is_empty() && elapsed <= budget;
    let line = format!(
        "criterion 10 {} CLI determinism: validate exit {:?}{}; golden fixtures {}/{} byte-identical{}; {:.2}s of {}s",
        if passed { "PASS" } else { "FAIL" },
        code,
        if failing.is_empty() { String::new() } else { format!(" ({})", failing.join(", ")) },
        GOLDEN.len() - mismatched.len(),
        GOLDEN.len(),
        if mismatched.is_empty() { String::new() } else { format!(" (mismatch: {})", mismatched.join(", ")) },
        elapsed.as_secs_f64(),
        budget.as_secs(),
    );
    announce(&line);
    assert!(passed, "{line}");
}
