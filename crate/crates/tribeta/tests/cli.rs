//! End-to-end runs of the `tribeta` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tribeta"))
}

fn run(args: &[&str], threads: usize) -> Output {
    bin().args(args).env("RAYON_NUM_THREADS", threads.to_string()).env_remove("TRIBETA_OUT_DIR").output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tribeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["spectrum", "--nonsense"],
        vec!["ks", "--kind", "Q"],
        vec!["ks", "--solver", "lapack"],
        vec!["ks", "--n", "0"],
        vec!["ks", "--beta", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args, 1).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_one_with_json() {
    // The subset oracle refuses n > 24.
    let out = run(&["charpoly", "--n", "30", "--method", "subset", "--kind", "S"], 1);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["status"], "error");
    assert_eq!(v["config"]["subcommand"], "charpoly");
}

#[test]
fn spectrum_is_deterministic_across_threads() {
    let args = ["spectrum", "--kind", "T", "--n", "60", "--beta", "4", "--m", "6", "--seed", "7", "--solver", "both"];
    let a = run(&args, 1);
    let b = run(&args, 8);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(header["kind"], "T");
    assert_eq!(header["n"], 60);
    assert!(header["solver_agreement"].as_f64().unwrap() < 1e-10);
    assert_eq!(lines.next(), Some("solver,realization,index,re,im"));
    assert_eq!(lines.count(), 2 * 6 * 60);
}

#[test]
fn ks_json_schema() {
    let out = run(&["ks", "--kind", "S", "--n", "100", "--beta", "10", "--m", "3", "--seed", "2"], 1);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["kind", "n", "beta", "m", "seed", "d", "runtime_s"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let d = v["d"].as_f64().unwrap();
    assert!(d > 0.0 && d < 1.0);
}

#[test]
fn sample_then_charpoly_from_file() {
    let p = tmp("m.csv");
    let out = run(&["sample", "--kind", "Ttilde", "--n", "7", "--beta", "3", "--seed", "5", "--out", p.to_str().unwrap()], 1);
    assert!(out.status.success());
    let first = std::fs::read_to_string(&p).unwrap();
    assert!(first.starts_with("# {"));
    assert!(first.lines().nth(1) == Some("row,col,re,im"));
    let a = run(&["charpoly", "--input", p.to_str().unwrap(), "--method", "recurrence"], 1);
    let b = run(&["charpoly", "--input", p.to_str().unwrap(), "--method", "subset"], 1);
    let va: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va["n"], 7);
    assert_eq!(va["kappa"].as_array().unwrap().len(), 3);
    for (x, y) in va["kappa"].as_array().unwrap().iter().zip(vb["kappa"].as_array().unwrap()) {
        for i in 0..2 {
            let (x, y) = (x[i].as_f64().unwrap(), y[i].as_f64().unwrap());
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}

#[test]
fn pseudospec_writes_grid_and_disc() {
    let p = tmp("ps.csv");
    let out = run(&["pseudospec", "--n", "20", "--res", "8", "--eps", "0.3", "--out", p.to_str().unwrap()], 1);
    assert!(out.status.success());
    let grid = std::fs::read_to_string(&p).unwrap();
    assert_eq!(grid.lines().nth(1), Some("x,y,smin"));
    assert_eq!(grid.lines().count(), 2 + 64);
    let disc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.with_extension("disc.json")).unwrap()).unwrap();
    assert_eq!(disc["eps"], 0.3);
    assert!(disc["radius_sq"].as_f64().unwrap() <= 0.09);
}

#[test]
fn out_dir_env_names_artifacts() {
    let d = tmp("outdir");
    let out = bin().args(["roundtrip", "--n", "8", "--m", "5"]).env("TRIBETA_OUT_DIR", &d).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("roundtrip.json")).unwrap()).unwrap();
    assert_eq!(v["roundtrip"]["failures"], 0);
}

#[test]
fn radial_hist_svg() {
    let out = run(&["radial-hist", "--n", "40", "--m", "3", "--bins", "10", "--format", "svg"], 1);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<rect").count(), 10);
    assert!(text.contains("<polyline"));
}

#[test]
fn remaining_subcommands_run() {
    for args in [
        vec!["radial-hist", "--n", "50", "--m", "4", "--bins", "20"],
        vec!["moments", "--n", "50", "--m", "2"],
        vec!["condnum", "--n", "20", "--m", "3", "--all"],
        vec!["lowtemp", "--n", "6", "--m", "2"],
        vec!["n2-density", "--kind", "S", "--beta", "20", "--points", "10"],
        vec!["ginibre-ref", "--n", "30", "--m", "4", "--radial", "dense", "--cond-m", "2"],
    ] {
        let out = run(&args, 1);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}
