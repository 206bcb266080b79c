use std::f64::consts::PI;
use std::process::Command;

use hypmt_cli::{emit_report, run, Format, RunConfig};
use serde_json::Value;

fn config(args: &[&str]) -> RunConfig {
    let mut full = vec!["hypmt"];
    full.extend_from_slice(args);
    RunConfig::from_args(full).expect("arguments parse")
}

#[test]
fn verify_lemma_example() {
    let report = run(&config(&["verify-lemma", "--n", "4", "--t-max", "20", "--points", "10000"])).unwrap();
    assert!(report.all_pass);
    assert_eq!(report.items.len(), 10_000);
    assert!(report.summary.trends["min_f"] >= 0.0);
}

#[test]
fn verify_comparison_example() {
    let report = run(&config(&["verify-comparison", "--n", "3", "--count", "100", "--seed", "7"])).unwrap();
    assert_eq!(report.items.len(), 100);
    assert!(report.items.iter().all(|i| i["pass"] == Value::Bool(true)));
    assert!(report.all_pass);
}

#[test]
fn lower_bound_example() {
    let report = run(&config(&["lower-bound", "--n", "2", "--lambda", "0"])).unwrap();
    let v = report.items[0]["lower_bound"].as_f64().unwrap();
    assert!((v - 16.0 * PI).abs() <= 1e-12 * 16.0 * PI);
    assert!(report.all_pass);
}

#[test]
fn empty_result_set_is_a_valid_document() {
    let report = run(&config(&["verify-comparison", "--count", "0"])).unwrap();
    assert_eq!(report.items.len(), 0);
    let json: Value = serde_json::from_slice(&emit_report(&report, Format::Json)).unwrap();
    assert_eq!(json["items"].as_array().unwrap().len(), 0);
    let csv = String::from_utf8(emit_report(&report, Format::Csv)).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn json_round_trip_and_sorted_keys() {
    let report = run(&config(&["moser", "--k", "5,10"])).unwrap();
    let bytes = emit_report(&report, Format::Json);
    let parsed: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(parsed, serde_json::to_value(&report).unwrap());
    let keys: Vec<&String> = parsed.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // reals carry 17 significant digits
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.contains("e0") || text.contains("e1"));
}

#[test]
fn csv_has_header_plus_one_row_per_item() {
    let report = run(&config(&["psi-k", "--n", "3", "--k", "2,5,20"])).unwrap();
    let text = String::from_utf8(emit_report(&report, Format::Csv)).unwrap();
    assert_eq!(text.lines().count(), report.items.len() + 1);
    assert_eq!(text.lines().next().unwrap(), report.columns.join(","));
}

#[test]
fn runs_are_deterministic_apart_from_timings() {
    let cfg = config(&["verify-comparison", "--n", "2", "--count", "10", "--seed", "3"]);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
}

#[test]
fn invalid_parameters_are_usage_errors() {
    assert!(matches!(
        run(&config(&["lower-bound", "--n", "2", "--lambda", "0.25"])),
        Err(hypmt_cli::CliError::Usage { field: "lambda", .. })
    ));
    assert!(matches!(
        run(&config(&["verify-lemma", "--points", "1"])),
        Err(hypmt_cli::CliError::Usage { .. })
    ));
    assert!(matches!(run(&config(&["moser", "--n", "1"])), Err(hypmt_cli::CliError::Usage { field: "n", .. })));
}

#[test]
fn binary_writes_report_atomically_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_hypmt"))
        .args(["lower-bound", "--n", "3", "--format", "csv", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn binary_uses_output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_hypmt"))
        .args(["psi-k", "--k", "5"])
        .env(hypmt_cli::OUTPUT_DIR_ENV, dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("psi-k.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "psi-k");
}

#[test]
fn binary_reads_profile_documents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cone.json");
    std::fs::write(&path, r#"{"n": 3, "knots": [0.0, 1.0, 2.0], "values": [1.0, 0.5, 0.0]}"#).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_hypmt"))
        .args(["profile-report", "--n", "3", "--profile"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let v: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(v["items"].as_array().unwrap().len(), 1);
    assert!(v["items"][0]["strong_slack"].as_f64().unwrap() >= -1e-8);
}

#[test]
fn binary_rejects_bad_arguments_with_usage_status() {
    let status = Command::new(env!("CARGO_BIN_EXE_hypmt"))
        .args(["lower-bound", "--lambda", "5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
