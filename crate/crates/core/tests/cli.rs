use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyi-coding"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn entropy_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write(
        dir.path(),
        "rho.json",
        r#"{"dim": 2, "entries": [[0.5, [0, 0]], [[0, 0], 0.5]]}"#,
    );
    let out = bin(&["entropy", "--input", &rho, "--alpha", "0.5", "--k", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for e in v["entropies"].as_array().unwrap() {
        assert!((e["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn build_code_from_spectrum_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.txt", "0.5 0.25\n0.25\n");
    let out = bin(&["build-code", "--input", &spec, "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["words"], serde_json::json!(["0", "10", "11"]));
    assert_eq!(v["kraft_sum"], serde_json::json!(1.0));
}

#[test]
fn build_code_at_infinity_is_uniform() {
    let out = bin(&["build-code", "--input", "0.7,0.1,0.1,0.1", "--t", "inf", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("index,eigenvalue,word,length\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",2")));
}

#[test]
fn encode_reports_three_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let ens = write(
        dir.path(),
        "ens.json",
        r#"{"probs": [0.5, 0.5], "states": [[1, 0, 0], [[0.7071067811865476, 0], 0, [0.7071067811865476, 0]]]}"#,
    );
    let book = write(dir.path(), "book.json", r#"{"k": 2, "words": ["0", "10", "11"]}"#);
    let out = bin(&["encode", "--input", &ens, "--codebook", &book, "--t", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["base_length"], 2);
    assert!((v["avg_length"].as_f64().unwrap() - 1.25).abs() < 1e-12);
    assert!((v["t_avg_length"].as_f64().unwrap() - 2.5f64.log2()).abs() < 1e-12);
    assert_eq!(v["codewords"][1]["terms"].as_object().unwrap().len(), 2);
}

#[test]
fn encode_rejects_malformed_codebook() {
    let dir = tempfile::tempdir().unwrap();
    let ens = write(dir.path(), "ens.json", r#"{"probs": [1], "states": [[1, 0]]}"#);
    let book = write(dir.path(), "book.json", r#"{"k": 2, "words": ["0", "01"]}"#);
    let out = bin(&["encode", "--input", &ens, "--codebook", &book]);
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_csv_is_deterministic_and_passes() {
    let a = bin(&["verify", "--seed", "42", "--trials", "2", "--format", "csv"]);
    let b = bin(&["verify", "--seed", "42", "--trials", "2", "--format", "csv"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("theorem_id,d,k,t,seed,lower,achieved,upper,gap_lower,gap_upper,pass\n"));
    assert!(!text.contains(",false\n"));
}

#[test]
fn verify_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reports.json");
    let out = bin(&["verify", "--trials", "1", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7 * 2 * 5 * 6);
}

#[test]
fn sweep_t_table() {
    let out = bin(&["sweep-t", "--input", "0.97,0.01,0.01,0.01", "--t", "0,2,inf", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows: Vec<Vec<String>> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    let bases: Vec<&str> = rows.iter().map(|r| r[5].as_str()).collect();
    assert_eq!(bases, ["7", "3", "2"]);
    assert_eq!(rows[2][0], "inf");
}

#[test]
fn block_limit_table() {
    let out = bin(&["block-limit", "--input", "0.9,0.1", "--K-max", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    assert!((points[1]["per_source_length"].as_f64().unwrap() - 0.645).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&bin(&["build-code", "--input", "0.5,0.5", "--t", "-1"])), 2);
    assert_eq!(code(&bin(&[])), 2);
    assert_eq!(code(&bin(&["entropy", "--input", "missing.json"])), 3);
    assert_eq!(code(&bin(&["entropy", "--input", "0.5,-0.5,1"])), 4);
    assert_eq!(code(&bin(&["block-limit", "--input", "0.5,0.5", "--K-max", "40"])), 5);
}
