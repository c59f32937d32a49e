use std::process::Command;

fn hdl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hdl"))
}

#[test]
fn odd_level_is_rejected() {
    let out = hdl().args(["--q", "2", "--r", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r must be 1 or even"));
}

#[test]
fn non_prime_power_is_rejected() {
    let out = hdl().args(["--q", "6", "--r", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = hdl()
        .args(["--q", "2", "--r", "2", "--torus", "nonsplit", "--check", "summation,integrality"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("total"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["config"]["tori"], serde_json::json!(["nonsplit"]));
    let checks: Vec<&str> = report["records"].as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert!(checks.iter().all(|c| *c == "summation" || *c == "integrality"));
    assert!(checks.contains(&"summation") && checks.contains(&"integrality"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"q": 3, "r": 3, "tori": ["split"]}"#).unwrap();
    let out = hdl().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = hdl().arg("--config").arg(&cfg).args(["--r", "1"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("q=3 r=1"));
}

#[test]
fn unknown_check_is_an_error() {
    let out = hdl().args(["--q", "2", "--r", "1", "--check", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
