use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gcq(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcq"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GCQ_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn digests(dir: &Path) -> Vec<(String, String)> {
    manifest(dir)["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            (
                a["path"].as_str().unwrap().to_string(),
                a["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn polytope_count_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = gcq(&["polytope", "count", "--n", "3", "--a", "1,1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "lattice=8 weyl=8 match=true");
    let o = gcq(&["polytope", "count", "--n", "2", "--a", "1"], dir.path());
    assert!(stdout(&o).starts_with("lattice=2 weyl=2"));
}

#[test]
fn polytope_gen_writes_json_and_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = gcq(&["polytope", "gen", "--n", "3", "--a", "2,1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let p: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("polytope.json")).unwrap())
            .unwrap();
    assert_eq!(p["dim"], 3);
    let csv = std::fs::read_to_string(dir.path().join("lattice.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    let m = manifest(dir.path());
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 2);
    assert_eq!(m["status"], "ok");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        gcq(&["polytope", "count", "--n", "3", "--a", "0,1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gcq(&["polytope", "count", "--n", "3"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gcq(&["polytope", "frobnicate"], dir.path()).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"h": 1e-3, "bogus": 1}"#).unwrap();
    let o = gcq(
        &["flow", "run", "--config", bad.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(
        gcq(
            &["flow", "run", "--config", bad.to_str().unwrap()],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        gcq(
            &["flow", "run", "--config", missing.to_str().unwrap()],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn tolerance_failure_exits_with_one_and_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let o = gcq(&["flow", "run", "--h", "0.3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance failure: pairing_drift"));
    assert_eq!(manifest(dir.path())["status"], "tolerance-failure");
}

#[test]
fn flow_run_is_deterministic_and_config_echo_round_trips() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let args = [
        "flow", "run", "--a", "1,1", "--t1", "1", "--t0", "0.5", "--h", "1e-3",
    ];
    let o = gcq(&args, a.path());
    assert_eq!(o.status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report["f_deviation"].as_f64().unwrap() < 1e-6);
    gcq(&args, b.path());
    assert_eq!(digests(a.path()), digests(b.path()));
    for (name, _) in digests(a.path()) {
        assert_eq!(
            std::fs::read(a.path().join(&name)).unwrap(),
            std::fs::read(b.path().join(&name)).unwrap()
        );
    }
    // Feeding the echoed config back reproduces the same payloads.
    let cfg = c.path().join("echo.json");
    std::fs::write(&cfg, manifest(a.path())["config"].to_string()).unwrap();
    gcq(
        &["flow", "run", "--config", cfg.to_str().unwrap()],
        c.path(),
    );
    assert_eq!(manifest(a.path())["config"], manifest(c.path())["config"]);
    assert_eq!(digests(a.path()), digests(c.path()));
}

#[test]
fn seed_environment_variable_overrides_file_but_not_flags() {
    let dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_gcq"))
            .args(["flag", "sample", "--samples", "3"])
            .args(extra)
            .arg("--out")
            .arg(dir.path())
            .env("GCQ_SEED", "42")
            .output()
            .unwrap();
        manifest(dir.path())["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(&[]), 42);
    assert_eq!(run(&["--seed", "7"]), 7);
}

#[test]
fn toric_concentrate_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = gcq(
        &[
            "toric",
            "concentrate",
            "--delta",
            "0..3",
            "--m",
            "1",
            "--s",
            "10,20,40",
            "--jobs",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("slope="));
    let csv = std::fs::read_to_string(dir.path().join("concentration.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("density.dat").exists());
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert!(summary["slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn lab_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = gcq(&["lab", "slice", "--a", "2,2", "--p", "2,3,1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"nodes": 3, "angles": 1, "s_grid": [0], "bundle_checks": 1}"#,
    )
    .unwrap();
    let o = gcq(
        &["lab", "combined", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("combined.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let o = gcq(
        &["lab", "gc-check", "--samples", "4", "--t", "0.5,0.1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
}
