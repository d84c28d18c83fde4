use std::process::{Command, Output};

fn ellgenus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellgenus")).args(args).env_remove("ELLGENUS_JOBS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eisenstein_weight_six() {
    let o = ellgenus(&["eisenstein-expand", "--weight", "6", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 -504 -16632 -122976\n");
}

#[test]
fn anomaly_pair_case_exits_zero() {
    let o = ellgenus(&["anomaly", "--gauge", "e8", "--d", "5", "--l", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["check"], "anomaly");
    assert_eq!(v[0]["instance"]["d"], 5);
    assert_eq!(v[0]["status"], "pass");
    assert!(v[0]["entries"][0]["label"].as_str().unwrap().contains("196560"));
}

#[test]
fn route_equivalence_without_gauge_passes() {
    let o = ellgenus(&["route-equivalence", "--d", "1", "--l", "1", "--gauge", "none"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS route-equivalence [d=1 l=1 gauge=none]"));
}

#[test]
fn failing_check_exits_one_with_witness() {
    let o = ellgenus(&["anomaly", "--gauge", "e8", "--case", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["status"], "fail");
    assert!(v[0]["witness"].as_str().unwrap().contains("monomial"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["--bogus"][..],
        &["route-equivalence", "--gauge", "so32"],
        &["prop-expansions", "--u-order", "3"],
        &["route-equivalence", "--d", "8", "--gauge", "e8"],
        &["anomaly", "--gauge", "e8", "--case", "-2"],
        &["anomaly", "--case", "2", "--d", "3", "--l", "2"],
        &["vanishing", "--clause", "6"],
        &["all", "--jobs", "0"],
    ] {
        assert_eq!(ellgenus(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_is_deterministic_across_job_counts() {
    let a = ellgenus(&["all", "--format", "json", "--no-timing", "--jobs", "1"]);
    let b = ellgenus(&["all", "--format", "json", "--no-timing", "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"]);
}

#[test]
fn report_file_is_written() {
    let dir = std::env::temp_dir().join(format!("ellgenus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = ellgenus(&["theta-check", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["status"] == "pass"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn key_order_is_fixed() {
    let o = ellgenus(&[
        "decompose-a0",
        "--d",
        "2",
        "--l",
        "2",
        "--gauge",
        "e8",
        "--weight",
        "4",
        "--format",
        "json",
        "--no-timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let pos = |k: &str| s.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("check") < pos("instance") && pos("instance") < pos("status") && pos("status") < pos("elapsed_ms"));
}
