use std::fs;
use std::process::Command;

fn locstat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_locstat"))
}

const CONFIG: &str = r#"{
  "sides": [256, 512],
  "energy": 0.0,
  "energy_prime": 1.0,
  "trials": 50
}"#;

#[test]
fn subcommand_writes_requested_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let status = locstat()
        .args(["independence", "--config"])
        .arg(&cfg)
        .args(["--seed", "9", "--trials", "30", "--threads", "2", "--format", "csv,json,svg", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(status.status.code().is_some_and(|c| c <= 1), "{stdout}");
    assert!(stdout.contains("independence@256"));
    let csv = fs::read_to_string(out.join("independence_trials.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 30 * 2);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("independence_report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 9);
    assert_eq!(json["config"]["trials"], 30);
    assert_eq!(json["schema_version"], 1);
    assert!(json["config"]["thresholds"]["significance"].is_number());
    assert!(out.join("independence_cf_gap_256.svg").exists());
}

#[test]
fn zero_trials_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = locstat()
        .args(["dos", "--trials", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("trials"));
}

#[test]
fn bad_format_and_missing_config_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = locstat()
        .args(["dos", "--format", "xml", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let missing = locstat()
        .args(["dos", "--config"])
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));
}

#[test]
fn oracle_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let status = locstat()
        .args(["oracle-check", "--trials", "20", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stdout));
}
