//! End-to-end runs of the `geoinv` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use geoinv::harness::random_cloud;
use tempfile::tempdir;

fn geoinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate_to(path: &Path, extra: &[&str]) -> String {
    let mut args = vec!["generate"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = geoinv(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn generate_reports_counts() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("a22.txt");
    let report = generate_to(&out, &["--dim", "2", "--parts", "2:2", "--class", "affine"]);
    assert!(report.contains("d=4"), "{report}");
    assert!(report.contains("invariants=1"));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("term 1/1 (2,0)(0,2)"));

    let out = dir.path().join("a34.txt");
    let report = generate_to(&out, &["--dim", "3", "--parts", "3:4", "--class", "affine"]);
    for needle in ["basis=715", "selected=25", "d=8", "pruned=84x25", "kernel=1", "invariants=1"] {
        assert!(report.contains(needle), "{needle} missing from {report}");
    }
}

#[test]
fn generate_excludes_products() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let report = generate_to(
        &out,
        &["--dim", "2", "--parts", "2:1,5:2", "--class", "rotation", "--exclude-products", "2:1,5:2"],
    );
    assert!(report.contains("known=3"), "{report}");
    assert!(report.contains("invariants=6"), "{report}");
    let report = generate_to(&out, &["--dim", "2", "--parts", "2:1,5:2", "--class", "rotation"]);
    assert!(report.contains("invariants=9"), "{report}");
}

#[test]
fn seed_is_echoed_and_output_is_deterministic() {
    let dir = tempdir().unwrap();
    let inv = dir.path().join("inv.txt");
    let report = generate_to(&inv, &["--dim", "3", "--parts", "2:2", "--class", "rotation", "--seed", "77"]);
    assert!(report.starts_with("seed=77\n"));
    let a = geoinv(&["eval", "--invariants", inv.to_str().unwrap(), "--seed", "3"]);
    let b = geoinv(&["eval", "--invariants", inv.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("seed=3\n"));
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert!(!lines.is_empty());
    for (k, line) in lines.iter().enumerate() {
        let (id, value) = line.split_once(' ').unwrap();
        assert_eq!(id, format!("inv{k}"));
        assert!(value.parse::<f64>().unwrap().is_finite());
    }
}

#[test]
fn eval_reads_point_files() {
    let dir = tempdir().unwrap();
    let inv = dir.path().join("inv.txt");
    generate_to(&inv, &["--dim", "2", "--parts", "2:1", "--class", "rotation"]);
    let pts = dir.path().join("square.txt");
    fs::write(&pts, "0 0\n1 0\n0 1\n1 1\n").unwrap();
    let o = geoinv(&["eval", "--invariants", inv.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // m20 + m02 of the unit square corners about their center
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let v: f64 = line.split_once(' ').unwrap().1.parse().unwrap();
    assert!((v - 2.0).abs() < 1e-14, "{line}");

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 0 0\n1 1 1\n").unwrap();
    let o = geoinv(&["eval", "--invariants", inv.to_str().unwrap(), "--points", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_writes_json() {
    let dir = tempdir().unwrap();
    let inv = dir.path().join("inv.txt");
    generate_to(&inv, &["--dim", "3", "--parts", "3:4", "--class", "affine"]);
    let pts = dir.path().join("cloud.txt");
    fs::write(&pts, random_cloud(3, 300, 4).unwrap().to_text()).unwrap();
    let json = dir.path().join("report.json");
    let o = geoinv(&[
        "verify",
        "--invariants",
        inv.to_str().unwrap(),
        "--points",
        pts.to_str().unwrap(),
        "--trials",
        "20",
        "--seed",
        "9",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("seed=9"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["seed"], 9);
    let checks = report["checks"].as_array().unwrap();
    // one affine invariant against four transform classes
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_fails_on_a_broken_invariant() {
    let dir = tempdir().unwrap();
    let inv = dir.path().join("inv.txt");
    generate_to(&inv, &["--dim", "2", "--parts", "2:2", "--class", "affine"]);
    let text = fs::read_to_string(&inv).unwrap().replace("term -1/1 (1,1)^2", "term -2/1 (1,1)^2");
    fs::write(&inv, text).unwrap();
    let o = geoinv(&["verify", "--invariants", inv.to_str().unwrap(), "--trials", "10"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(geoinv(&[]).status.code(), Some(2));
    assert_eq!(geoinv(&["generate", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(geoinv(&["generate", "--dim", "2", "--parts", "2:0"]).status.code(), Some(2));
    assert_eq!(
        geoinv(&["generate", "--dim", "2", "--parts", "2:1", "--planes", "some"]).status.code(),
        Some(2)
    );
    assert_eq!(
        geoinv(&["generate", "--dim", "2", "--parts", "2:1,3:1", "--exclude-products", "4:1"]).status.code(),
        Some(2)
    );
    assert_eq!(geoinv(&["verify", "--invariants", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(geoinv(&["--help"]).status.code(), Some(0));
}
