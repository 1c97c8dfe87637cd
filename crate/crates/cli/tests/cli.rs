use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bae::{simulate_data, RngStream, SymmetricMatrix};
use bae_cli::io::write_csv;

fn bae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bae"))
        .args(args)
        .env("BAE_PARALLELISM", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn sample_csv(dir: &Path, name: &str, p: usize, n: usize, seed: u64, header: bool) -> PathBuf {
    let data = simulate_data(&SymmetricMatrix::identity(p), n, &mut RngStream::new(seed)).unwrap();
    let path = dir.join(name);
    let rows: Vec<Vec<f64>> = (0..n).map(|i| data.row(i).to_vec()).collect();
    write_csv(&path, &rows).unwrap();
    if header {
        let names: Vec<String> = (1..=p).map(|k| format!("x{k}")).collect();
        let body = fs::read_to_string(&path).unwrap();
        fs::write(&path, format!("{}\n{body}", names.join(","))).unwrap();
    }
    path
}

const SHORT: [&str; 4] = ["--burn-in", "50", "--samples", "100"];

#[test]
fn estimate_writes_summary_edges_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sample_csv(dir.path(), "d.csv", 5, 100, 1, true);
    let out = dir.path().join("out");
    let o = bae(&[&["estimate", csv.to_str().unwrap(), "--out-dir", out.to_str().unwrap()], &SHORT[..]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["dim_p"], 5);
    assert_eq!(summary["summary"]["sample_size_n"], 100);
    assert_eq!(summary["run_config"]["seed"], 1);
    assert!(summary["tool_version"].is_string());
    let edges = fs::read_to_string(out.join("edges.tsv")).unwrap();
    let lines: Vec<&str> = edges.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "i\tj\trho_mean\tomega_mean\tpresent");
    assert_eq!(lines.len(), 2 + 10);
    assert!(out.join("trace.bin").exists());
    assert!(out.join("run.log").exists());
}

#[test]
fn same_seed_gives_identical_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sample_csv(dir.path(), "d.csv", 4, 60, 2, false);
    let out = dir.path().join("out");
    let run = || {
        let o = bae(&[&["estimate", csv.to_str().unwrap(), "--seed", "42", "--out-dir", out.to_str().unwrap()], &SHORT[..]].concat());
        assert_eq!(code(&o), 0);
        (fs::read(out.join("trace.bin")).unwrap(), fs::read(out.join("summary.json")).unwrap())
    };
    let a = run();
    let b = run();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}

#[test]
fn embedded_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sample_csv(dir.path(), "d.csv", 4, 60, 3, false);
    let out = dir.path().join("first");
    let o = bae(&[&["estimate", csv.to_str().unwrap(), "--seed", "9", "--prior", "bagr", "--out-dir", out.to_str().unwrap()], &SHORT[..]].concat());
    assert_eq!(code(&o), 0);
    let first = fs::read(out.join("edges.tsv")).unwrap();
    let saved = dir.path().join("saved.json");
    fs::copy(out.join("summary.json"), &saved).unwrap();
    fs::remove_dir_all(&out).unwrap();
    let o = bae(&["estimate", csv.to_str().unwrap(), "--config", saved.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(first, fs::read(out.join("edges.tsv")).unwrap());
}

#[test]
fn exit_codes_partition_failures() {
    let dir = tempfile::tempdir().unwrap();
    let na = dir.path().join("na.csv");
    fs::write(&na, "a,b\n1,2\n3,NA\n").unwrap();
    let o = bae(&["estimate", na.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 2"));

    let a = sample_csv(dir.path(), "a.csv", 3, 20, 1, false);
    let b = sample_csv(dir.path(), "b.csv", 4, 20, 1, false);
    let o = bae(&["diffnet", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 3);

    let one = dir.path().join("one.csv");
    fs::write(&one, "1,2\n").unwrap();
    assert_eq!(code(&bae(&["estimate", one.to_str().unwrap()])), 3);

    let o = bae(&["estimate", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.csv"));

    let junk = dir.path().join("junk.bin");
    fs::write(&junk, b"not a trace").unwrap();
    assert_eq!(code(&bae(&["diagnose", junk.to_str().unwrap()])), 2);

    assert_eq!(code(&bae(&["estimate", a.to_str().unwrap(), "--psi", "3"])), 2);
    assert_eq!(code(&bae(&["frobnicate"])), 2);
}

#[test]
fn diffnet_then_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let a = sample_csv(dir.path(), "a.csv", 4, 80, 1, true);
    let out = dir.path().join("out");
    let o = bae(&[&["diffnet", a.to_str().unwrap(), a.to_str().unwrap(), "--out-dir", out.to_str().unwrap()], &SHORT[..]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = fs::read_to_string(out.join("delta_edges.tsv")).unwrap();
    assert_eq!(tsv.lines().nth(1).unwrap(), "i\tj\trho1\trho2\tdelta\tclass");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("diffnet.json")).unwrap()).unwrap();
    assert!(json["network"]["delta"].is_object());

    let o = bae(&[&["estimate", a.to_str().unwrap(), "--out-dir", out.to_str().unwrap()], &SHORT[..]].concat());
    assert_eq!(code(&o), 0);
    let o = bae(&["diagnose", out.join("trace.bin").to_str().unwrap(), "--max-lag", "20", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mixing = fs::read_to_string(out.join("mixing.csv")).unwrap();
    assert!(mixing.lines().next().unwrap().contains("median_of_elements"));
    assert_eq!(mixing.lines().count(), 2 + 10);
}

#[test]
fn benchmark_calibrate_and_timing_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o_dir = out.to_str().unwrap();
    let o = bae(&[
        "benchmark", "--models", "M2,M6", "--p", "6", "--reps", "2", "--estimators", "bae",
        "--oracle", "--burn-in", "30", "--samples", "60", "--out-dir", o_dir,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("tables.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("model,p,estimator,component,metric"));
    assert!(csv.contains("M6,6,ORACLE,2,L1,0,0,2,0"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("tables.json")).unwrap()).unwrap();
    assert!(json["tables"]["components"]["2"]["SE"]["M2"]["6"]["BAE"]["median"].is_number());

    let o = bae(&[
        "calibrate", "--models", "M2", "--p", "6", "--reps", "1", "--grid-step", "0.2", "--grid-max", "0.2",
        "--weights", "1,0", "--burn-in", "30", "--samples", "60", "--out-dir", o_dir,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let psi: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("psi.json")).unwrap()).unwrap();
    assert_eq!(psi["psi"], psi["psi_f1_median"]);
    assert_eq!(fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 2 + 2 * 2);

    let o = bae(&["timing", "--p", "5,10", "--iterations", "5", "--out-dir", o_dir]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(out.join("timing.csv")).unwrap().lines().count(), 4);
}
