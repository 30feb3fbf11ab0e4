use std::path::Path;
use std::process::{Command, Output};

use degenspec_cli::Table;

const SURFACE: &str = r#"{"genus": 2, "cusps": 0, "elliptic_orders": [3, 7], "degenerating": [1],
  "lengths": [{"l": 1.2}, {"l": 2.0, "mult": 2}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn trace_grid_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let surface = write(dir.path(), "s.json", SURFACE);
    let text = stdout(&run(&["trace", "--surface", &surface, "--t", "log:0.01:10:50"]));
    let table = Table::parse_csv(&text).unwrap();
    assert_eq!(table.rows.len(), 50);
    assert_eq!(table.columns[0], "t");
    assert!(table.comments.iter().any(|c| c.starts_with("input_sha256:")));
    for row in &table.rows {
        assert!(row.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"genus": 1, "cusps": 0, "colour": 3}"#);
    assert_eq!(run(&["surface", "--surface", &bad]).status.code(), Some(2));
    let good = write(dir.path(), "s.json", SURFACE);
    for grid in ["", "1:0:5", "0:1:0", "2,1"] {
        let out = run(&["trace", "--surface", &good, "--t", grid]);
        assert_eq!(out.status.code(), Some(2), "grid `{grid}`");
    }
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn bad_signature_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "neg.json", r#"{"genus": 0, "cusps": 0, "elliptic_orders": [2, 3]}"#);
    assert_eq!(run(&["surface", "--surface", &path]).status.code(), Some(4));
}

#[test]
fn hecke_sweep_slope_near_inverse_pi() {
    let text = stdout(&run(&["hecke-sweep", "--N", "1000,10000,100000"]));
    let table = Table::parse_csv(&text).unwrap();
    assert_eq!(table.rows.len(), 3);
    let line = table.comments.iter().find(|c| c.starts_with("slope:")).unwrap();
    let slope: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((slope - 1.0 / std::f64::consts::PI).abs() < 0.01, "slope {slope}");
}

#[test]
fn csv_output_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("count.csv");
    let status = run(&["--out", out.to_str().unwrap(), "count", "--eigs", "0,0.3,1.7,4", "--T", "0:5:11", "--w", "1"]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let table = Table::parse_csv(&text).unwrap();
    assert_eq!(table.rows.len(), 11);
    assert_eq!(table.to_csv().unwrap(), text);
}

#[test]
fn json_and_svg_formats() {
    let json = stdout(&run(&["--format", "json", "det", "--eigs", "1,2,3"]));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
    let svg = stdout(&run(&["--format", "svg", "zeta", "--circle", "--s", "0.6:2:5"]));
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn determinant_of_small_spectrum() {
    let text = stdout(&run(&["det", "--eigs", "1,2,3"]));
    let table = Table::parse_csv(&text).unwrap();
    let col = table.columns.iter().position(|c| c == "det").unwrap();
    assert!((table.rows[0][col] - 6.0).abs() < 1e-9);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let surface = write(dir.path(), "s.json", SURFACE);
    let args = ["zeta", "--surface", &surface, "--s", "1.5,2,3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
}
