use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mitest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mitest")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn test_on_fixture_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", "10,20\n20,10\n");
    let out = mitest(&["test", "--input", &input, "--stat", "t2", "--alpha", "0.05", "--pvalue", "classical"]);
    let doc = json(&out);
    let r = &doc["result"];
    assert!((r["value"].as_f64().unwrap() - 6.6667).abs() < 1e-4);
    assert!((r["p_value"].as_f64().unwrap() - 0.0098).abs() < 1e-4);
    assert_eq!(r["reject"], Value::Bool(true));
    assert_eq!(r["null"]["dof"], 1);
    assert_eq!(doc["config"]["stat"], "T2");
    assert_eq!(doc["timing_ms"], Value::Null);
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["config", "result", "warnings", "timing_ms"]);
}

#[test]
fn series_test_reports_weights() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", "10,20\n20,10\n");
    let doc = json(&mitest(&["test", "--input", &input]));
    let r = &doc["result"];
    assert_eq!(r["statistic"], "T1");
    assert!((r["value"].as_f64().unwrap() - 6.7960).abs() < 1e-4);
    assert_eq!(r["null"]["weights"], serde_json::json!([1.0, 0.0, 0.0]));
    assert_eq!(r["method"], "series");
}

#[test]
fn weights_on_uniform_5x5() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", &"8,8,8,8,8\n".repeat(5));
    let doc = json(&mitest(&["weights", "--input", &input]));
    let w: Vec<f64> = doc["result"]["weights"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(w.len(), 24);
    assert_eq!(w.iter().filter(|&&v| v == 1.0).count(), 16);
    assert_eq!(w.iter().filter(|&&v| v == 0.0).count(), 8);
}

#[test]
fn missing_file_is_a_data_error_naming_the_path() {
    let out = mitest(&["test", "--input", "missing.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing.csv"));
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn malformed_csv_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "1,2\n3\n");
    let out = mitest(&["test", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", "10,20\n20,10\n");
    assert_eq!(mitest(&["test", "--input", &input, "--bogus"]).status.code(), Some(2));
    assert_eq!(mitest(&["test", "--input", &input, "--pvalue", "mc"]).status.code(), Some(2));
    assert_eq!(mitest(&["test", "--input", &input, "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(mitest(&["simulate", "--dist-x", "uniform:3", "--dist-y", "uniform:3", "--n", "50"]).status.code(), Some(2));
    assert_eq!(mitest(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mitest(&["weights", "--input", &input, "--rule", "fixed:3"]).status.code(), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", "12,7,3\n5,9,11\n");
    let runs = [
        vec!["test", "--input", &input, "--pvalue", "mc", "--mc-draws", "20000", "--seed", "5"],
        vec!["simulate", "--dist-x", "binom:4:0.5", "--dist-y", "uniform:5", "--n", "100", "--reps", "300", "--seed", "9"],
        vec!["power", "--dist-x", "uniform:3", "--dist-y", "uniform:3", "--n", "200", "--reps", "100", "--seed", "2"],
    ];
    for args in runs {
        let a = mitest(&args);
        let b = mitest(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "counts.csv", "10,20\n20,10\n");
    let out_path = dir.path().join("report.csv");
    let out = mitest(&["test", "--input", &input, "--stat", "pearson", "--csv", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(out_path).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("value,6.66666666667\n"));
}

#[test]
fn pairs_input_is_binned() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("x,y\n");
    for k in 0..200 {
        let x = (k as f64 * 0.37).sin();
        let _ = std::fmt::Write::write_fmt(&mut text, format_args!("{x},{}\n", x * 2.0 + (k % 7) as f64 * 0.01));
    }
    let input = write(dir.path(), "pairs.csv", &text);
    let doc = json(&mitest(&["bin", "--input", &input, "--rule", "fixed:4:4"]));
    assert_eq!(doc["result"]["dims"], serde_json::json!([4, 4]));
    assert_eq!(doc["result"]["n"], 200);
    let doc = json(&mitest(&["test", "--input", &input, "--format", "pairs", "--stat", "t2", "--pvalue", "classical"]));
    assert_eq!(doc["result"]["reject"], Value::Bool(true));
    assert_eq!(doc["config"]["rule"], "rice");
}

#[test]
fn verify_and_curve() {
    let doc = json(&mitest(&["verify-conjecture", "--dims", "4x3", "--trials", "50", "--seed", "1"]));
    assert_eq!(doc["results"][0]["pass"], Value::Bool(true));
    let doc = json(&mitest(&["curve", "--points", "3", "--surface", "2"]));
    let curve = doc["results"]["curve"].as_array().unwrap();
    assert_eq!(curve[1]["mi"], 0.0);
    assert!((curve[0]["mi"].as_f64().unwrap() - 0.08495).abs() < 1e-5);
    assert_eq!(doc["results"]["surface"].as_array().unwrap().len(), 10);
}

#[test]
fn timing_is_opt_in() {
    let doc = json(&mitest(&["curve", "--points", "3", "--timing"]));
    assert!(doc["timing_ms"].is_number());
}
