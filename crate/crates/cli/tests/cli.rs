//! End-to-end checks of the scenario runner binary and library surface.

use enkappa_cli::{parse_config, run_scenario, Context};
use std::path::PathBuf;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enkappa"))
}

fn write_config(dir: &std::path::Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn list_prints_scenario_ids() {
    let out = binary().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["background-residual", "picard-contraction", "appendix-inequalities"] {
        assert!(text.contains(id), "{text}");
    }
}

#[test]
fn unknown_scenario_is_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"scenario": "foo"}"#);
    let out = binary()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn malformed_config_is_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"solver": {"nope": 3}}"#);
    let out = binary()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nope"), "{err}");
}

#[test]
fn background_scenario_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"scenario": "background-residual"}"#);
    let out_dir = dir.path().join("out");
    let out = binary()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("[PASS] background/residual"), "{stdout}");
    let csv = std::fs::read_to_string(out_dir.join("background.csv")).unwrap();
    assert!(csv.starts_with("quantity,value"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenario": "char-geometry-sweep", "seed": 11}"#,
    );
    let mut payloads = Vec::new();
    for run in 0..2 {
        let out_dir = dir.path().join(format!("out{run}"));
        let out = binary()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        payloads.push(std::fs::read(out_dir.join("char_sweep.csv")).unwrap());
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn pulse_csv_has_the_contracted_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(
        r#"{"scenario": "gaussian-pulse-1d", "grid": {"points": 128}, "solver": {"t_final": 0.5}}"#,
    )
    .unwrap();
    let ctx = Context::new(config, dir.path().join("out")).unwrap();
    // A coarse grid keeps this contract test fast; convergence-grade runs
    // live in the acceptance suite at the default resolution.
    let bundle = run_scenario(&ctx).unwrap();
    assert!(!bundle.checks.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("out/pulse_diagnostics.csv")).unwrap();
    assert!(
        csv.starts_with("t,L2,HN,sup,E_cone,constraint_defect,cone_deviation"),
        "{}",
        csv.lines().next().unwrap_or_default()
    );
}

#[test]
fn failing_checks_exit_one() {
    // An unresolved grid cannot hit the convergence order: the bundle
    // reports the failure and the process exits 1.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenario": "gaussian-pulse-1d", "grid": {"points": 16}, "solver": {"t_final": 0.25}}"#,
    );
    let out = binary()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn desk_suite_checks_are_unique_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(r#"{"grid": {"points": 128}, "solver": {"t_final": 0.5}}"#).unwrap();
    let ctx = Context::new(config, dir.path().join("out")).unwrap();
    let bundle = run_scenario(&ctx).unwrap();
    let mut names: Vec<&str> = bundle.checks.iter().map(|c| c.name.as_str()).collect();
    let total = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), total, "duplicate check names");
    // Every scenario contributed.
    for prefix in [
        "background/", "char/", "energy/", "pulse/", "picard/", "causality/", "dependence/",
        "appendix/",
    ] {
        assert!(
            names.iter().any(|n| n.starts_with(prefix)),
            "missing {prefix}"
        );
    }
    for file in &bundle.files {
        assert!(file.exists(), "{file:?} missing");
    }
}
