use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn topoinfer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topoinfer")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn match_prints_count_and_brute_force() {
    let out = topoinfer(&["match", "--rows", "4", "--cols", "4", "--brute-force"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("36"));
    assert!(lines.next().unwrap().contains("agree"));
}

#[test]
fn match_on_large_grid_is_exact() {
    let out = topoinfer(&["match", "--rows", "8", "--cols", "8"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "12988816");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&topoinfer(&[])), 2);
    assert_eq!(code(&topoinfer(&["frobnicate"])), 2);
    assert_eq!(code(&topoinfer(&["match", "--rows", "0", "--cols", "3"])), 2);
    // detect needs an explicit threshold
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k4.edges");
    fs::write(&g, "4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n").unwrap();
    assert_eq!(code(&topoinfer(&["detect", "--in", path_str(&g), "--seed", "1"])), 2);
    let missing = dir.path().join("absent.edges");
    assert_eq!(code(&topoinfer(&["zeta", "--in", path_str(&missing)])), 2);
}

#[test]
fn computation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // a path has minimum degree one, so the zeta polynomial is undefined
    let path = dir.path().join("path.edges");
    fs::write(&path, "3 2\n0 1 1\n1 2 1\n").unwrap();
    assert_eq!(code(&topoinfer(&["zeta", "--in", path_str(&path)])), 3);
}

#[test]
fn flagged_results_exit_4() {
    let out = topoinfer(&["ergodic", "--map", "rotation", "--observable", "const", "--points", "100", "--seed", "1"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn zeta_report_for_k4() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k4.edges");
    fs::write(&g, "4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n").unwrap();
    let out = dir.path().join("k4.json");
    assert_eq!(code(&topoinfer(&["zeta", "--in", path_str(&g), "--max-m", "6", "--out", path_str(&out)])), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let coeffs: Vec<&str> = report["zeta_reciprocal"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(coeffs.len(), 13);
    assert_eq!(&coeffs[..4], ["1", "0", "0", "-8"]);
    assert_eq!(report["loop_counts"][2], "24");
    assert_eq!(report["euler_product_agrees"], true);
}

#[test]
fn manifest_digests_the_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("walk.csv");
    let g = dir.path().join("c5.edges");
    fs::write(&g, "5 5\n0 1 1\n1 2 1\n2 3 1\n3 4 1\n4 0 1\n").unwrap();
    let args = ["--workers", "2", "walk", "--in", path_str(&g), "--start", "0", "--steps", "6", "--trajectories", "500", "--seed", "9", "--out", path_str(&out)];
    assert_eq!(code(&topoinfer(&args)), 0);
    let manifest_path = dir.path().join("walk.csv.manifest.json");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "walk");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["workers"], 2);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for entry in outputs {
        let bytes = fs::read(entry["path"].as_str().unwrap()).unwrap();
        assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    assert!(dir.path().join("walk.returns.csv").exists());
}

#[test]
fn detect_is_reproducible_across_processes_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("planted.edges");
    let gen = ["generate", "--ensemble", "planted", "--n1", "40", "--n2", "40", "--k", "0", "--p-intra", "0.15", "--seed", "3", "--out", path_str(&g)];
    assert_eq!(code(&topoinfer(&gen)), 0);
    let run = |workers: &str| {
        let out = topoinfer(&["--workers", workers, "detect", "--in", path_str(&g), "--pairs", "4", "--walk-len", "300", "--threshold", "0.5", "--seed", "77"]);
        assert_eq!(code(&out), 0);
        out.stdout
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
    let verdict: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(verdict["non_incident_accesses"], 0);
}
