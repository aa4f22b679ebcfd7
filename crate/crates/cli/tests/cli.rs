//! End-to-end runs of the `necklace` binary.

use std::path::Path;
use std::process::{Command, Output};

use necklace_core::io::{parse_obj, read_csv, ChainDocument, CoverRow, ReportRow, SampleRow};

fn necklace(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necklace"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("NECKLACE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

const CHAIN_20: [&str; 8] = ["regular", "--r-T", "0.30696969696969695", "--m", "10", "--s", "0.23454545454545456", "--R-T"];

fn regular_20(out: &Path) -> Output {
    let mut args = CHAIN_20.to_vec();
    args.push("1");
    necklace(out, &args)
}

#[test]
fn build_chain_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = necklace(dir.path(), &["build-chain", "--rb", "1", "--RB", "4"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("config: ") && stdout.contains("seed: 0"));
    let doc = ChainDocument::from_json(&read(dir.path().join("chain.json"))).unwrap();
    assert_eq!(doc.links.len(), 12);
    assert_eq!(doc.to_chain().unwrap().k(), 12);
    let verdict: serde_json::Value = serde_json::from_str(&read(dir.path().join("verdict.json"))).unwrap();
    assert_eq!(verdict["format_version"], 1);
    assert!(verdict["result"]["enclosing"]["skipped"].is_string());

    let bad = necklace(dir.path(), &["build-chain", "--rb", "1", "--RB", "3"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("R_B > 3 r_B"));
    let small_m = necklace(dir.path(), &["build-chain", "--rb", "1", "--RB", "4", "--m", "2"]);
    assert_eq!(code(&small_m), 2);
    assert!(String::from_utf8_lossy(&small_m.stderr).contains("psi0"));
}

#[test]
fn build_chain_with_enclosing_torus() {
    let dir = tempfile::tempdir().unwrap();
    let o = necklace(dir.path(), &["build-chain", "--rb", "1", "--RB", "4", "--m", "13"]);
    assert_eq!(code(&o), 0);
    let doc = ChainDocument::from_json(&read(dir.path().join("chain_similar.json"))).unwrap();
    assert!((doc.ambient.minor / doc.ambient.major - 0.25).abs() < 1e-15);
    assert!(doc.ambient.minor > 5.0);
}

#[test]
fn regular_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&necklace(dir.path(), &["regular"])), 0);
    let invalid = necklace(dir.path(), &["regular", "--r-T", "0.3", "--m", "12", "--s", "0.2"]);
    assert_eq!(code(&invalid), 3);
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("disjoint"));
    assert!(dir.path().join("verdict.json").exists());
    assert_eq!(code(&necklace(dir.path(), &["regular", "--r-T", "1.5"])), 2);
}

#[test]
fn mesh_of_twenty_link_chain() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&regular_20(dir.path())), 0);
    let chain = dir.path().join("chain.json");
    let o = necklace(dir.path(), &["mesh", "--chain", chain.to_str().unwrap(), "--seg-major", "40", "--seg-minor", "10"]);
    assert_eq!(code(&o), 0);
    let meshes = parse_obj(&read(dir.path().join("mesh.obj"))).unwrap();
    assert_eq!(meshes.len(), 20);
    for m in &meshes {
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_closed());
    }
}

#[test]
fn iterate_and_project() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&necklace(dir.path(), &["regular"])), 0);
    let chain = dir.path().join("chain.json");
    let chain = chain.to_str().unwrap();

    let o = necklace(dir.path(), &["iterate", "--chain", chain, "--lambda", "0", "--points", "0"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<CoverRow> = read_csv(&read(dir.path().join("cover.csv"))).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].word, "-");

    let o = necklace(dir.path(), &["iterate", "--chain", chain, "--lambda", "2", "--points", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_csv::<CoverRow>(&read(dir.path().join("cover.csv"))).unwrap().len(), 576);
    assert_eq!(read_csv::<SampleRow>(&read(dir.path().join("samples.csv"))).unwrap().len(), 1000);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path().join("iterate_summary.json"))).unwrap();
    assert_eq!(summary["result"]["certified"], true);

    let o = necklace(
        dir.path(),
        &["project", "--chain", chain, "--scheme", "axis-aligned", "--points", "10000", "--lambda", "1", "--raster-n", "128"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv::<ReportRow>(&read(dir.path().join("reports.csv"))).unwrap().len(), 3);

    let over = necklace(dir.path(), &["iterate", "--chain", chain, "--lambda", "5"]);
    assert_eq!(code(&over), 4);
    let missing = necklace(dir.path(), &["iterate"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn same_seed_same_bytes() {
    let base = tempfile::tempdir().unwrap();
    assert_eq!(code(&necklace(base.path(), &["regular"])), 0);
    let chain = base.path().join("chain.json");
    let run = |sub: &str, seed: &str| {
        let out = base.path().join(sub);
        let o = necklace(&out, &["--seed", seed, "iterate", "--chain", chain.to_str().unwrap(), "--points", "3000"]);
        assert_eq!(code(&o), 0);
        (std::fs::read(out.join("samples.csv")).unwrap(), std::fs::read(out.join("cover.csv")).unwrap())
    };
    let (a, b, c) = (run("a", "11"), run("b", "11"), run("c", "12"));
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
    assert_eq!(a.1, c.1);
}

#[test]
fn search_writes_scan_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = necklace(
        dir.path(),
        &["search", "--m", "9,12", "--rho-lo", "0.2", "--rho-hi", "0.3", "--rho-steps", "5", "--s-lo", "0.18", "--s-hi", "0.2", "--s-steps", "5"],
    );
    assert_eq!(code(&o), 0);
    let csv = read(dir.path().join("scan.csv"));
    assert!(csv.starts_with("# format_version=1\nrho,s,m,links,valid,certified,"));
    assert_eq!(csv.lines().count(), 2 + 50);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path().join("scan_summary.json"))).unwrap();
    assert_eq!(summary["result"]["per_m"][0]["valid"], 0);
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 5, "regular": {"r_T": 0.27, "m": 12, "s": 0.196}}"#).unwrap();
    let out = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_necklace"))
        .args(["--config", cfg.to_str().unwrap(), "regular"])
        .env("NECKLACE_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("seed: 5"));
    assert!(out.join("chain.json").exists());

    std::fs::write(&cfg, r#"{"regular": {"r_T": 0.27, "colour": 1}}"#).unwrap();
    let o = necklace(dir.path(), &["--config", cfg.to_str().unwrap(), "regular"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let o = necklace(dir.path(), &["--tol", "0.5", "regular"]);
    assert_eq!(code(&o), 2);
}
