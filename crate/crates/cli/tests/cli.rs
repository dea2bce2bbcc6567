use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lengthen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lengthen"))
        .args(args)
        .env_remove("LENGTHEN_BITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn cusp_polygon_has_three_times_two_to_the_depth_sides() {
    let out = lengthen(&["polygon", "--A", "3", "--B", "3", "--C", "3", "--depth", "6", "--bits", "256"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["classification"], "cusp");
    assert_eq!(v["mode"], "generic");
    assert_eq!(v["edges"].as_array().unwrap().len(), 192);
    assert_eq!(v["bits"], 256);
}

#[test]
fn verify_passes_on_a_funnel() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.json");
    let out = lengthen(&["verify", "--A", "3", "--B", "3", "--C", "4", "--depth", "8", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    for expected in ["k_constancy", "certificates", "convexity", "nesting", "quadrilateral", "closed_form", "membership"] {
        assert!(names.contains(&expected), "missing suite {expected}");
    }
}

#[test]
fn injected_fault_fails_verification() {
    let out = lengthen(&["verify", "--A", "3", "--B", "3", "--C", "4", "--depth", "3", "--inject-fault", "1e-12"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let closed = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "closed_form").unwrap();
    assert_eq!(closed["passed"], false);
}

#[test]
fn euclidean_limit_distances_decrease() {
    let out = lengthen(&["limits", "--mode", "euclidean", "--l", "1", "--m", "1", "--n", "1", "--steps", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let d: Vec<f64> =
        v["rows"].as_array().unwrap().iter().map(|r| r["hausdorff"].as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(d.len(), 4);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn one_pinch_limits_and_polygon() {
    let out = lengthen(&["limits", "--mode", "one_pinch", "--y", "1.5", "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let out = lengthen(&["polygon", "--A", "2", "--B", "3", "--C", "3", "--depth", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["mode"], "one_pinch");
    assert_eq!(v["chart"], "XY:1/0");
}

#[test]
fn output_is_deterministic() {
    let args = ["polygon", "--A", "2.5", "--B", "3.1", "--C", "4.2", "--depth", "5", "--workers", "4"];
    let a = lengthen(&args);
    let b = lengthen(&args[..args.len() - 2]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&lengthen(&["polygon", "--bogus"])), 2);
    assert_eq!(code(&lengthen(&["polygon", "--A", "3", "--B", "3"])), 2);
    assert_eq!(code(&lengthen(&["polygon", "--A", "3", "--B", "3", "--C", "3", "--l", "1"])), 2);
    assert_eq!(code(&lengthen(&["polygon", "--A", "3", "--B", "3", "--C", "3", "--depth", "40"])), 2);
    assert_eq!(code(&lengthen(&["polygon", "--A", "1", "--B", "1", "--C", "1"])), 2);
    assert_eq!(code(&lengthen(&["polygon", "--A", "x", "--B", "1", "--C", "1"])), 2);
}

#[test]
fn invalid_triple_reports_header_only_when_allowed() {
    let out = lengthen(&["polygon", "--A", "1", "--B", "1", "--C", "1", "--allow-invalid"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["classification"], "invalid");
    assert!(v["edges"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "A = \"3\"\nB = \"3\"\nC = \"4\"\ndepth = 2\nbits = 128\n").unwrap();
    let out = lengthen(&["polygon", "--config", cfg.to_str().unwrap(), "--depth", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["bits"], 128);
    assert_eq!(v["depth"], 3);

    let out = Command::new(env!("CARGO_BIN_EXE_lengthen"))
        .args(["polygon", "--A", "3", "--B", "3", "--C", "4", "--depth", "1"])
        .env("LENGTHEN_BITS", "160")
        .output()
        .unwrap();
    assert_eq!(json(&out)["bits"], 160);

    std::fs::write(&cfg, "A = \"3\"\nunknown = 1\n").unwrap();
    assert_eq!(code(&lengthen(&["polygon", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn csv_output_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sides.csv");
    let out = lengthen(&["polygon", "--A", "3", "--B", "3", "--C", "4", "--depth", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(&reader.headers().unwrap()[0], "slope");
    assert_eq!(reader.records().count(), 12);
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let i = reader.headers().unwrap().iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    reader.records().map(|r| r.unwrap()[i].to_string()).collect()
}

#[test]
fn sweeps_have_their_columns() {
    let out = lengthen(&["sweep", "--path", "shrink", "--l", "1", "--m", "1", "--n", "1", "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv_column(&text, "t").len(), 3);
    assert_eq!(csv_column(&text, "hausdorff").len(), 3);

    let out = lengthen(&["sweep", "--path", "n", "--l", "0.5", "--x", "0.2", "--y", "1.5", "--from", "1", "--to", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv_column(&text, "n"), ["1", "2", "3", "4"]);
    assert!(csv_column(&text, "gap_proportion").iter().all(|g| !g.is_empty()));

    let out = lengthen(&["sweep", "--path", "pinch", "--steps", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let gap: Vec<f64> = csv_column(&text, "gap_proportion").iter().map(|g| g.parse().unwrap()).collect();
    let limit: Vec<f64> = csv_column(&text, "limit").iter().map(|g| g.parse().unwrap()).collect();
    for (g, l) in gap.iter().zip(&limit) {
        assert!((g - l).abs() < 1e-3, "{g} vs {l}");
    }
}

fn svg_at(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));
    text
}

#[test]
fn renders_every_figure() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("l1.svg", &["--l", "0.5", "--x", "0.2", "--y", "1.5", "--chart", "L1"]),
        ("octant.svg", &["--A", "3", "--B", "3", "--C", "4", "--depth", "3", "--chart", "octant"]),
        ("pinch.svg", &["--mode", "one_pinch", "--y", "1.5"]),
        ("disk.svg", &["--mode", "euclidean", "--depth", "3"]),
        ("slices.svg", &["--slices", "0.5,1,3", "--depth", "3"]),
    ];
    for (name, extra) in cases {
        let path = dir.path().join(name);
        let mut args = vec!["render", "--svg", path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = lengthen(&args);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = svg_at(&path);
        assert!(text.contains("<polyline") || text.contains("<polygon"), "{name}");
    }
    assert!(svg_at(&dir.path().join("l1.svg")).contains("baseline-shift=\"super\""));
}
