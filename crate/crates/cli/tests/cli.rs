use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_thermowitness"));
    cmd.env_remove("THERMOWITNESS_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(path).expect("fixture exists")
}

/// Vertex list of the single `<polygon>` element.
fn polygon_vertices(svg: &str) -> Vec<(f64, f64)> {
    assert_eq!(svg.matches("<polygon").count(), 1, "expected exactly one polygon");
    let start = svg.find("<polygon").unwrap();
    let tag = &svg[start..start + svg[start..].find("/>").unwrap()];
    let attr = tag.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    attr.split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn default_scan_has_3600_rows_and_is_byte_stable() {
    let a = run(&["scan"]);
    let b = run(&["scan"]);
    assert!(a.status.success());
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kT_over_J,B_over_J,W,entangled");
    assert_eq!(lines.len(), 3601);
    assert_eq!(a.stdout, b.stdout);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let w: f64 = fields[2].parse().unwrap();
        assert!(w.is_finite());
        assert_eq!(fields[3].parse::<bool>().unwrap(), w > 1.0);
    }
}

#[test]
fn scan_json_carries_metadata() {
    let out = run(&["scan", "--kt-count", "2", "--b-count", "2", "--out", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let meta = &doc["metadata"];
    assert_eq!(meta["quadrature"]["abs_tol"], 1e-10);
    assert_eq!(meta["magnetization_formula"], "log-partition-derivative");
    assert!(meta["timestamp"].as_str().unwrap().ends_with('Z'));
    assert_eq!(doc["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn svg_region_matches_golden_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("region.svg");
    let out = run(&["scan", "--kt-count", "4", "--b-count", "7", "--svg", svg_path.to_str().unwrap()]);
    assert!(out.status.success());
    let produced = std::fs::read_to_string(&svg_path).unwrap();
    let golden = fixture("region_small.svg");
    let (p, g) = (polygon_vertices(&produced), polygon_vertices(&golden));
    assert_eq!(p.len(), g.len());
    for (a, b) in p.iter().zip(&g) {
        assert!((a.0 - b.0).abs() < 0.01 && (a.1 - b.1).abs() < 0.01, "{a:?} vs {b:?}");
    }
    assert!(produced.contains(">B/|J|<") && produced.contains(">kT/|J|<"));
}

#[test]
fn boundary_csv_has_endpoint_comments() {
    let out = run(&["boundary", "--b-values", "0,0.5,1.3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# B=0 critical kT/|J|"));
    assert!(lines[1].starts_with("# kT->0 critical B/|J| = 2*sqrt(1-pi^2/16) = 1.2379817"));
    assert_eq!(lines[2], "B_over_J,kTc_over_J");
    let kt0: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!((kt0 - 1.366836).abs() < 1e-4);
    assert_eq!(lines[5], "1.3,no crossing");
}

#[test]
fn measured_witness() {
    let out = run(&["witness", "--measured", "--u", "-20", "--m", "2", "--b", "0.5", "--n", "8", "--j", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "W,threshold,entangled,source\n2.375,1,true,external-measurement\n");
}

#[test]
fn finite_and_limit_witness() {
    let out = run(&["witness", "--model", "xxx", "--n", "8", "--kt", "0.5", "--out", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["source"], "finite-exact");
    assert!(doc["entangled"].as_bool().unwrap());

    let out = run(&["witness", "--model", "xx", "--kt", "3", "--out", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["source"], "thermodynamic-limit");
    assert!(!doc["entangled"].as_bool().unwrap());
}

#[test]
fn exact_reports_observables_and_pair_concurrence() {
    let out = run(&["exact", "--model", "xxx", "--n", "6", "--kt", "0.3", "--pair", "0", "--out", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let u = doc["observables"]["energy"].as_f64().unwrap();
    let c = doc["pair"]["concurrence"].as_f64().unwrap();
    // antiferromagnetic ring: C = (|U|/(N|J|) - 1)/2
    assert!((c - 0.5 * (u.abs() / 6.0 - 1.0)).abs() < 1e-8);
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"xxx\"\nn = 4\nkt = 0.5\nout = \"json\"\n").unwrap();
    let from_file = run(&["witness", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(doc["inputs"]["n_sites"], 4);

    let overridden = run(&["witness", "--config", cfg.to_str().unwrap(), "--n", "6"]);
    let doc: serde_json::Value = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(doc["inputs"]["n_sites"], 6);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["witness", "--model", "xxx", "--n", "0", "--kt", "1"]).status.code(), Some(1));
    assert_eq!(run(&["witness", "--model", "xxx", "--n", "4", "--kt", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["witness", "--model", "xyz", "--n", "4", "--kt", "1", "--jz", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["exact", "--model", "xxx", "--n", "30", "--kt", "1"]).status.code(), Some(1));
    let bad_workers = bin().env("THERMOWITNESS_WORKERS", "zero").args(["scan"]).output().unwrap();
    assert_eq!(bad_workers.status.code(), Some(1));
}

#[test]
fn unwritable_output_fails_without_partial_success() {
    let out = run(&["scan", "--kt-count", "2", "--b-count", "2", "--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn non_finite_reduced_point_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "j = 1e300\nkt = 1e-300\n").unwrap();
    let out = run(&["witness", "--model", "xx", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_passes_and_tight_override_exits_3() {
    let ok = run(&["validate", "--samples", "2000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).lines().all(|l| !l.starts_with("FAIL")));

    let tight = run(&["validate", "--samples", "2000", "--tol", "1e-17"]);
    assert_eq!(tight.status.code(), Some(3));
    assert!(stdout(&tight).contains("FAIL (tolerance-induced)"));

    let printed = run(&["validate", "--samples", "2000", "--eq9-as-printed"]);
    assert_eq!(printed.status.code(), Some(3));
    assert!(stdout(&printed).contains("documented discrepancy"));
}

#[test]
fn measured_examples_and_verdicts_exit_0() {
    let out = run(&["witness", "--measured", "--u", "-1.773", "--m", "0", "--b", "0", "--j", "1", "--n", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "W,threshold,entangled,source\n1.773,1,true,external-measurement\n");

    let out = run(&["witness", "--measured", "--u", "0", "--m", "0", "--b", "1", "--j", "1", "--n", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "W,threshold,entangled,source\n0,1,false,external-measurement\n");
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let args = ["scan", "--kt-count", "12", "--b-count", "9"];
    let one = bin().env("THERMOWITNESS_WORKERS", "1").args(args).output().unwrap();
    let four = bin().env("THERMOWITNESS_WORKERS", "4").args(args).output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);

    let args = ["boundary", "--b-count", "7"];
    let one = bin().env("THERMOWITNESS_WORKERS", "1").args(args).output().unwrap();
    let four = bin().env("THERMOWITNESS_WORKERS", "4").args(args).output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn scan_above_critical_temperature_plots_no_region() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("empty.svg");
    let out = run(&[
        "scan", "--kt-min", "1.5", "--kt-max", "3", "--kt-count", "4", "--b-count", "5", "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with(",false")));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 0);
    assert!(svg.contains(">B/|J|<"));
}

#[test]
fn boundary_json_records_bisection_tolerance() {
    let out = run(&["boundary", "--b-values", "0,1", "--tol", "1e-8", "--out", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["bisection_tolerance"], 1e-8);
    for p in doc["points"].as_array().unwrap() {
        assert_eq!(p["outcome"]["kind"], "crossing");
        assert!(p["outcome"]["residual"].as_f64().unwrap().abs() < 1e-8);
    }
}
