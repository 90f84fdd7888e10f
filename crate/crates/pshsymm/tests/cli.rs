//! Exit-code and file-layout contract of the `pshsymm` binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pshsymm"))
}

#[test]
fn analyze_writes_the_full_layout_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["analyze", "log-norm", "--n", "2"])
        .arg("--out")
        .arg(&out)
        .arg("--mc-samples")
        .arg("200000")
        .status()
        .unwrap();
    assert!(status.success(), "exit {status:?}");
    let dir = out.join("log-norm-n2");
    for file in ["report.json", "theorems.json", "volumes.csv", "profiles.csv", "summary.md"] {
        assert!(dir.join(file).is_file(), "missing {file}");
    }
    assert!(dir.join("plots").join("profiles.svg").is_file());
    // volumes.csv uses LF endings and the pinned header
    let csv = std::fs::read_to_string(dir.join("volumes.csv")).unwrap();
    assert!(csv.starts_with("t,volume,abs_error,method,nodes\n"));
    assert!(!csv.contains('\r'));
    // no partial directories left behind
    assert!(!out.join(".tmp-log-norm-n2").exists());
}

#[test]
fn analyze_applies_expected_values_for_log_norm_n3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["analyze", "log-norm", "--n", "3", "--mc-samples", "200000"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("log-norm-n3").join("report.json")).unwrap(),
    )
    .unwrap();
    let inv = &report["invariants"];
    let nu = inv["nu"]["slope"].as_f64().unwrap();
    let iota = inv["iota_volume"]["slope"].as_f64().unwrap();
    let tau_hat = inv["tau_hat"].as_f64().unwrap();
    assert!((nu - 1.0).abs() < 0.02, "nu = {nu}");
    assert!((iota - 1.0 / 3.0).abs() < 0.02, "iota = {iota}");
    assert!((tau_hat - 1.0).abs() < 0.05, "tau_hat = {tau_hat}");
}

#[test]
fn malformed_spec_exits_one_with_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("bad.json");
    std::fs::write(&spec, r#"{"dimension": 2, "symmetry": "toric", "body": {"kind": "closed_form"}}"#)
        .unwrap();
    let output = bin()
        .arg("analyze")
        .arg(&spec)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("schema error"), "stderr: {stderr}");
}

#[test]
fn unknown_entry_exits_one() {
    let output = bin().args(["analyze", "no-such-entry"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn verify_single_entry_exits_zero_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = bin()
        .args(["verify", "log-norm-n2", "--mc-samples", "200000"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("skoda-sandwich"));
    assert!(stdout.contains("all applicable checks PASS"));
    assert!(out.join("summary.md").is_file());
    assert!(out.join("log-norm-n2").join("theorems.json").is_file());
}

#[test]
fn seed_env_var_is_a_fallback() {
    // the env seed must land in the config echo; a flag overrides it
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["analyze", "log-norm", "--mc-samples", "200000"])
        .arg("--out")
        .arg(&out)
        .env("PSH_SYMM_SEED", "777")
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("log-norm-n2").join("report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["config"]["seed"].as_u64(), Some(777));

    let status = bin()
        .args(["analyze", "log-norm", "--mc-samples", "200000", "--seed", "9"])
        .arg("--out")
        .arg(&out)
        .env("PSH_SYMM_SEED", "777")
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("log-norm-n2").join("report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["config"]["seed"].as_u64(), Some(9));
}
