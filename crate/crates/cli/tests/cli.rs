use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hasse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn j_report_lists_distinct_values() {
    let out = hasse(&["j-report", "--g", "1", "--h", "0", "--theta", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_ne!(rows[0]["j"], rows[1]["j"]);
    assert_eq!(v["distinct"], "2");
}

#[test]
fn mode_violations_exit_with_config_error() {
    let out = hasse(&["certify-all", "--g", "3", "--h", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g = 1 mod 4"));
    let out = hasse(&["j-report", "--g", "5", "--h", "1", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hasse(&["point-search", "--g", "1", "--h", "0", "--height", "0"]).status.code(), Some(2));
    assert_eq!(hasse(&["instantiate", "--g", "1", "--h", "0", "--theta", "1/0"]).status.code(), Some(2));
    assert_eq!(hasse(&["instantiate", "--h", "0"]).status.code(), Some(2));
}

#[test]
fn theta_zero_run_writes_a_certified_report() {
    let path = scratch("theta-zero.json");
    let out = hasse(&["certify-all", "--g", "3", "--h", "0", "--mode", "theta-zero", "--height", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["certified"], "1");
    assert_eq!(v["fibers"][0]["obstruction"]["sum"], "1/2");
    assert_eq!(v["fibers"][0]["point_search"]["curve_points"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_with_flag_overrides() {
    let path = scratch("config.json");
    std::fs::write(&path, r#"{"g": "1", "h": "0", "thetas": {"list": ["inf", "-2/3"]}, "params": {"sieve": {"bound": "10000000", "index": "0"}}}"#).unwrap();
    let out = hasse(&["instantiate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["fibers"].as_array().unwrap().len(), 2);
    assert_eq!(v["fibers"][0]["theta"], "inf");
    assert_eq!(v["fibers"][1]["smoothness"]["surface"], true);
    let out = hasse(&["instantiate", "--config", path.to_str().unwrap(), "--theta", "2"]);
    assert_eq!(json(&out)["fibers"].as_array().unwrap().len(), 1);
}

#[test]
fn job_count_does_not_change_certificates() {
    let run = |jobs: &str| {
        let out = hasse(&["certify-brauer", "--g", "1", "--h", "0", "--theta", "0,-1/3", "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0));
        json(&out)["fibers"].clone()
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn point_search_on_a_fiber_is_empty() {
    let out = hasse(&["point-search", "--g", "1", "--h", "0", "--theta", "3/2", "--height", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["result"]["surface_points"].as_array().unwrap().len(), 0);
}

#[test]
fn sieve_params_reports_conditions() {
    let out = hasse(&["sieve-params", "--g", "1", "--h", "0", "--count", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["params"]["a"], "1753");
}
