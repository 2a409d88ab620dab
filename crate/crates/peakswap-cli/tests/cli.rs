use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn peakswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakswap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = peakswap(args);
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_of(args)).expect("JSON output")
}

fn allocation(value: &Value) -> Vec<String> {
    value["allocation"]
        .as_array()
        .expect("allocation array")
        .iter()
        .map(|v| match v {
            Value::String(s) => s.clone(),
            Value::Number(k) => k.to_string(),
            other => panic!("unexpected allocation entry {other:?}"),
        })
        .collect()
}

#[test]
fn both_crawlers_reproduce_the_contested_middle_allocation() {
    let file = fixture("contested-middle-4.json");
    let file = file.to_str().unwrap();
    let expected = ["w4", "w2", "w1", "w3"];
    assert_eq!(allocation(&json_of(&["run", "acr", file])), expected);
    assert_eq!(allocation(&json_of(&["run", "dcr", file])), expected);
}

#[test]
fn trace_lines_follow_the_allocation() {
    let file = fixture("contested-middle-4.json");
    let out = stdout_of(&["run", "acr", file.to_str().unwrap(), "--trace"]);
    let mut lines = out.lines();
    let first: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(allocation(&first), ["w4", "w2", "w1", "w3"]);
    let steps: Vec<&str> = lines.collect();
    assert_eq!(
        steps,
        [
            "step 1: agent 2 takes w2; shifted agents: none",
            "step 2: agent 3 takes w1; shifted agents: 1",
            "step 3: agent 4 takes w3; shifted agents: 1",
            "step 4: agent 1 takes w4; shifted agents: none",
        ]
    );
}

#[test]
fn top_trading_cycles_diverges_on_the_same_problem() {
    let file = fixture("contested-middle-4.json");
    let got = allocation(&json_of(&["run", "ttc", file.to_str().unwrap()]));
    assert_eq!(got, ["w4", "w2", "w3", "w1"]);
}

#[test]
fn sequential_priority_needs_an_order() {
    let file = fixture("identity-peaks.json");
    let file = file.to_str().unwrap();
    let out = peakswap(&["run", "sp", file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--order"));

    let got = allocation(&json_of(&["run", "sp", file, "--order", "4,3,2,1"]));
    assert_eq!(got, ["h1", "h2", "h3", "h4"]);
}

#[test]
fn crawler_keeps_the_endowment_when_peaks_match_it() {
    let file = fixture("identity-peaks.json");
    let got = allocation(&json_of(&["run", "acr", file.to_str().unwrap()]));
    assert_eq!(got, ["h1", "h2", "h3", "h4"]);
}

#[test]
fn run_rejects_mismatched_flags() {
    let file = fixture("identity-peaks.json");
    let file = file.to_str().unwrap();
    let stray_order = peakswap(&["run", "acr", file, "--order", "1,2,3,4"]);
    assert_eq!(stray_order.status.code(), Some(2));
    let stray_trace = peakswap(&["run", "ttc", file, "--trace"]);
    assert_eq!(stray_trace.status.code(), Some(2));
}

#[test]
fn indices_are_used_when_the_file_names_no_axis() {
    let file = fixture("pivot-3.json");
    let got = allocation(&json_of(&["run", "acr", file.to_str().unwrap()]));
    assert_eq!(got, ["1", "0", "2"]);
}

#[test]
fn verify_reports_a_passing_suite() {
    let report = json_of(&["verify", "theorem1", "--n", "2"]);
    assert_eq!(report["suite"], "theorem1");
    assert_eq!(report["mode"], "exhaustive");
    assert_eq!(report["instances_checked"], 8);
    assert_eq!(report["pass"], true);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_runs_the_fixed_comparison_scenario() {
    let report = json_of(&["verify", "example3"]);
    assert_eq!(report["instances_checked"], 5);
    assert_eq!(report["pass"], true);
}

#[test]
fn verify_rejects_bad_requests() {
    let unknown = peakswap(&["verify", "theorem9"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown suite"));

    let oversized = peakswap(&["verify", "theorem1", "--n", "5"]);
    assert_eq!(oversized.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&oversized.stderr).contains("n <= 4"));

    let missing_seed = peakswap(&["verify", "theorem1", "--n", "5", "--mode", "sample", "--samples", "10"]);
    assert_eq!(missing_seed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_seed.stderr).contains("--seed"));
}

#[test]
fn sampled_verification_is_reported_with_its_draw() {
    let report = json_of(&[
        "verify", "theorem1", "--n", "5", "--mode", "sample", "--samples", "50", "--seed", "9",
        "--jobs", "2",
    ]);
    assert_eq!(report["samples"], 50);
    assert_eq!(report["seed"], 9);
    assert_eq!(report["instances_checked"], 50);
    assert_eq!(report["pass"], true);
}

#[test]
fn distribution_splits_a_contested_pair_evenly() {
    let file = fixture("contested-2.json");
    let doc = json_of(&["distribution", "rp", file.to_str().unwrap()]);
    assert_eq!(doc["rule"], "rp");
    assert_eq!(doc["denominator"], 2);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for entry in entries {
        assert_eq!(entry["numerator"], 1);
    }
}

#[test]
fn distribution_csv_puts_all_weight_on_the_peaks() {
    let file = fixture("opposed-peaks-2.json");
    let out = stdout_of(&[
        "distribution",
        "rcr",
        file.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out, "allocation,numerator,denominator\no1-o2,2,2\n");
}

#[test]
fn random_endowment_liftings_match_random_priority() {
    let file = fixture("contested-middle-4.json");
    let file = file.to_str().unwrap();
    let rp = stdout_of(&["distribution", "rp", file, "--format", "csv"]);
    let rcr = stdout_of(&["distribution", "rcr", file, "--format", "csv"]);
    let rttc = stdout_of(&["distribution", "rttc", file, "--format", "csv"]);
    assert_eq!(rp, rcr);
    assert_eq!(rp, rttc);
    assert!(rp.starts_with("allocation,numerator,denominator\n"));
}

#[test]
fn unreadable_or_malformed_problems_exit_with_usage_code() {
    let missing = peakswap(&["run", "acr", "no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = std::env::temp_dir().join("peakswap-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"preferences\": [[0, 0], [1]]").unwrap();
    let malformed = peakswap(&["run", "acr", bad.to_str().unwrap()]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("error"));

    std::fs::write(&bad, "{\"n\": 2, \"preferences\": [[0, 0], [1, 0]]}").unwrap();
    let invalid = peakswap(&["run", "acr", bad.to_str().unwrap()]);
    assert_eq!(invalid.status.code(), Some(2));
}
