use std::fs;
use std::process::{Command, Output};

fn oddic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddic")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"graph": {"fixture": "exp1_7node"}, "init": {"mean": 50.5, "std_dev": 24.75},
            "disruptors": [{"fixture": "EXP1_7/D1", "node": 0}, {"fixture": "EXP1_7/D2", "node": 6}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = oddic(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--runs", "2", "--tmax", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trajectories.csv", "metrics.csv", "summary.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 2 * 9);
}

#[test]
fn config_errors_exit_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"graph": {"random": {"n": 4, "in_degree": 2}}, "init": {"mean": 0, "std_dev": 1}, "settings": {"eta": 0}}"#)
        .unwrap();
    let o = oddic(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("settings.eta"), "{}", stderr(&o));

    let o = oddic(&["run", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = oddic(&["exp1", "--policy", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn robustness_reports_verdict() {
    let o = oddic(&["robustness", "exp1_7node", "3", "3"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("is (3,3)-robust"));
    let o = oddic(&["robustness", "exp1_7node", "4", "4"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("is NOT (4,4)-robust"));
    let o = oddic(&["robustness", "no_such_graph", "1", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn experiment_policy_filter() {
    let dir = tempfile::tempdir().unwrap();
    let o = oddic(&["exp3", "--runs", "2", "--tmax", "5", "--policy", "msr", "--seed", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().starts_with("msr")));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 3);
    assert_eq!(manifest["rows"]["summary"], 9 * 6);
}
