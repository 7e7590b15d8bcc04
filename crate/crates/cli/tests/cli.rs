//! Exit-code contract and artifact layout of the `gaplab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn gaplab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn preset_listing_and_printing() {
    let dir = tempfile::tempdir().unwrap();
    let o = gaplab(&["preset"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let listing = text(&o.stdout);
    assert!(listing.lines().any(|l| l == "perfect-blowup"));
    assert_eq!(listing.lines().count(), 14);

    let o = gaplab(&["preset", "capacity"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sweep"]["study"], "capacity_asymptotics");

    let o = gaplab(&["preset", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("unknown preset"));
}

#[test]
fn matrix_check_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = gaplab(&["matrix-check", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let run = dir.path().join("matrix-check-7");
    assert!(run.join("report.csv").is_file());
    let summary = std::fs::read_to_string(run.join("summary.txt")).unwrap();
    assert!(summary.contains("result: PASS"));
}

#[test]
fn overlapping_inclusions_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("overlap.json");
    std::fs::write(
        &cfg,
        r#"{"name": "overlap", "mode": "perfect",
            "geometry": {"fixed": {
                "outer": {"disk": {"center": [0, 0], "radius": 4}},
                "inclusions": [
                    {"disk": {"center": [-0.5, 0], "radius": 1}},
                    {"disk": {"center": [0.5, 0], "radius": 1}}]}},
            "data": {"kind": "linear", "coeffs": [0, 0.25, 0]}}"#,
    )
    .unwrap();
    let o = gaplab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("inclusions intersect"), "{}", text(&o.stderr));
}

#[test]
fn unknown_keys_exit_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"name": "bad", "mode": "sweep", "numerics": {"coarse": 10}}"#).unwrap();
    let o = gaplab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o.stderr);
    assert!(err.contains("numerics") && err.contains("coarse"), "{err}");
}

#[test]
fn failed_criterion_exits_one_with_named_line() {
    let dir = tempfile::tempdir().unwrap();
    let printed = gaplab(&["preset", "transmission"], dir.path());
    let mut v: serde_json::Value = serde_json::from_slice(&printed.stdout).unwrap();
    // A deliberately wrong reference energy must fail the closed-form check.
    v["sweep"]["reference"] = serde_json::json!(1.0);
    v["numerics"]["coarse_n"] = serde_json::json!(128);
    let cfg = dir.path().join("wrong.json");
    std::fs::write(&cfg, v.to_string()).unwrap();
    let o = gaplab(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("FAIL I0 matches the closed form"), "{}", text(&o.stderr));
    assert!(dir.path().join("transmission-0").join("summary.txt").is_file());
}
