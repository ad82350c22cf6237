use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn multitime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multitime"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(name: &str, extra: &[&str]) -> Output {
    let path = configs().join(name);
    let mut args = vec!["--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    multitime(&args)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn damped_qubit_coherence_decays_at_half_the_rate() {
    let out = run_config("damped_qubit_corr.json", &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "tau,re,im,abs");
    let rows = rows(&out);
    assert_eq!(rows.len(), 81);
    for row in rows {
        let tau: f64 = row[0].parse().unwrap();
        let abs: f64 = row[3].parse().unwrap();
        assert!(
            (abs - (-0.05 * tau).exp()).abs() <= 1e-6,
            "tau {tau}: {abs}"
        );
    }
}

#[test]
fn decompose_reports_one_emission_mode() {
    let out = run_config("damped_qubit_decompose.json", &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = rows(&out);
    let modes: Vec<_> = rows.iter().filter(|r| r[1] == "mode").collect();
    assert_eq!(modes.len(), 1);
    let parse = |s: &str| s.parse::<f64>().unwrap();
    assert!((parse(&modes[0][3]) - 1.0).abs() < 1e-12);
    assert!((parse(&modes[0][4]) - 0.1).abs() < 1e-12);
    assert_eq!(parse(&modes[0][5]), 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for name in [
        "dimer_otoc.json",
        "qubit_general_corr.json",
        "oscillator_evolve.json",
    ] {
        let a = run_config(name, &[]);
        let b = run_config(name, &[]);
        assert!(a.status.success(), "{name}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn overrides_replace_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("steady.json");
    let out = run_config(
        "damped_qubit_corr.json",
        &[
            "--task",
            "steady",
            "--format",
            "json",
            "--out",
            out_path.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let records = value.as_array().unwrap();
    assert_eq!(records.len(), 4);
    // zero temperature: everything relaxes to the ground state, index 1
    let ground = records
        .iter()
        .find(|r| r["row"] == 1 && r["col"] == 1)
        .unwrap();
    assert!((ground["re"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn slot_budget_and_tolerance_flags_are_honoured() {
    let reference = run_config("dimer_otoc.json", &[]);
    let matrix_free = run_config(
        "dimer_otoc.json",
        &["--slot-budget", "16", "--tol", "1e-12"],
    );
    assert!(matrix_free.status.success(), "{}", stderr(&matrix_free));
    let (a, b) = (rows(&reference), rows(&matrix_free));
    for (x, y) in a.iter().zip(&b) {
        let re = |r: &Vec<String>| r[1].parse::<f64>().unwrap();
        assert!((re(x) - re(y)).abs() < 1e-8);
    }
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"model": {"kind": "two_level_atom", "omega0": 1.0, "gamma": 0.1}, "task": "steady", "colour": 1}"#,
            "unknown field",
        ),
        (
            r#"{"model": {"kind": "two_level_atom", "omega0": 1.0, "gamma": 0.1}, "task": "otoc",
                "otoc": {"initial_state": "excited", "w": "a†", "v": "sx2", "grid": {"start": 0, "stop": 1, "points": 2}}}"#,
            "otoc.v",
        ),
        (
            r#"{"model": {"kind": "two_level_atom", "omega0": 1.0, "gamma": 0.1}, "task": "evolve",
                "evolve": {"initial_state": [[[1, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]],
                           "observable": "sz", "grid": {"start": 0, "stop": 1, "points": 2}}}"#,
            "3×3 but the model dimension is 2",
        ),
        (
            r#"{"model": {"kind": "two_level_atom", "omega0": 1.0, "gamma": 0.1}, "task": "corr"}"#,
            "needs a 'corr' section",
        ),
        (
            r#"{"model": {"kind": "two_level_atom", "omega0": -1.0, "gamma": 0.1}, "task": "steady"}"#,
            "omega0",
        ),
    ];
    for (text, needle) in cases {
        let path = write_config(dir.path(), text);
        let out = multitime(&["--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(
            stderr(&out).contains(needle),
            "{needle} not in {}",
            stderr(&out)
        );
    }
    let out = multitime(&[
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // without dissipation every diagonal state is stationary
    let path = write_config(
        dir.path(),
        r#"{"model": {"kind": "two_level_atom", "omega0": 1.0, "gamma": 0.0}, "task": "steady"}"#,
    );
    let out = multitime(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("numerical failure") && err.contains("steady state is not unique"),
        "{err}"
    );
}

#[test]
fn output_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("coherence.csv");
    std::fs::write(&target, "stale").unwrap();
    let out = run_config(
        "damped_qubit_corr.json",
        &["--out", target.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("tau,re,im,abs\n"));
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}
