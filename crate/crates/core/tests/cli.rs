//! End-to-end checks of the `coxnet` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coxnet::cli::CurveReport;
use serde_json::{json, Value};
use tempfile::TempDir;

fn base_config() -> Value {
    json!({
        "system": { "antennas": 4, "alpha": 4.0, "noise": 1e-12, "link_distance": 10.0 },
        "model": { "type": "piecewise_power_law", "segments": [
            { "inner": 0.0, "outer": null, "density": 0.01, "exponent": -0.5 }
        ] },
        "gamma_grid": { "min": 100.0, "max": 1e7, "points": 40, "spacing": "log" },
        "trials": 2000,
        "seed": 7
    })
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn coxnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxnet")).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, command: &str, cfg: &Path, out: &str, extra: &[&str]) -> (i32, String) {
    let out_path = dir.join(out);
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = coxnet(&args);
    let text = std::fs::read_to_string(&out_path).unwrap_or_default();
    (o.status.code().unwrap(), text)
}

#[test]
fn report_reemits_byte_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base_config());
    let (code, text) = run_to(dir.path(), "compare", &cfg, "r.csv", &[]);
    assert_eq!(code, 0);
    let report = CurveReport::parse(&text).unwrap();
    assert_eq!(report.to_csv(), text);
    assert_eq!(report.meta_value("command"), Some("compare"));
    assert_eq!(report.meta_value("seed"), Some("7"));
    assert_eq!(report.rows.len(), 40);
}

#[test]
fn same_seed_same_output_and_different_seed_differs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base_config());
    let (_, a) = run_to(dir.path(), "simulate", &cfg, "a.csv", &["--threads", "1"]);
    let (_, b) = run_to(dir.path(), "simulate", &cfg, "b.csv", &["--threads", "4"]);
    let (_, c) = run_to(dir.path(), "simulate", &cfg, "c.csv", &["--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn tolerance_exit_code() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base_config());
    let (code, text) = run_to(dir.path(), "compare", &cfg, "r.csv", &["--tolerance", "0.5"]);
    assert_eq!(code, 0);
    let ks: f64 = CurveReport::parse(&text).unwrap().meta_value("sup_deviation").unwrap().parse().unwrap();
    let tight = format!("{}", ks * 0.5);
    let (code, _) = run_to(dir.path(), "compare", &cfg, "r2.csv", &["--tolerance", &tight]);
    assert_eq!(code, 3);
}

#[test]
fn empty_grid_and_unknown_fields_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["gamma_grid"]["points"] = json!(0);
    let p = write_config(dir.path(), "empty.json", &cfg);
    assert_eq!(coxnet(&["analytic", "--config", p.to_str().unwrap()]).status.code(), Some(1));
    let mut cfg = base_config();
    cfg["unexpected"] = json!(1);
    let p = write_config(dir.path(), "extra.json", &cfg);
    let o = coxnet(&["analytic", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unexpected"));
    assert_eq!(coxnet(&["analytic"]).status.code(), Some(1));
}

#[test]
fn superposition_matches_merged_piecewise_model() {
    let dir = TempDir::new().unwrap();
    let seg = |inner: f64, outer: Option<f64>, d: f64| json!({ "inner": inner, "outer": outer, "density": d, "exponent": -0.5 });
    let mut sup = base_config();
    sup["model"] = json!({ "type": "superposition", "members": [
        { "type": "piecewise_power_law", "segments": [seg(0.0, Some(20.0), 0.01)] },
        { "type": "piecewise_power_law", "segments": [seg(20.0, None, 0.01)] }
    ] });
    let merged = base_config();
    let (_, a) = run_to(dir.path(), "analytic", &write_config(dir.path(), "s.json", &sup), "a.csv", &[]);
    let (_, b) = run_to(dir.path(), "analytic", &write_config(dir.path(), "m.json", &merged), "b.csv", &[]);
    let (a, b) = (CurveReport::parse(&a).unwrap(), CurveReport::parse(&b).unwrap());
    let (fa, fb) = (a.column("analytic_cdf").unwrap(), b.column("analytic_cdf").unwrap());
    for (x, y) in fa.iter().zip(&fb) {
        assert!((x.unwrap() - y.unwrap()).abs() < 1e-10);
    }
}

#[test]
fn optimize_guard_reports_an_interior_optimum() {
    let dir = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["system"] = json!({ "antennas": 5, "alpha": 4.0, "noise": 1e-14, "link_distance": 5.0 });
    cfg["guard"] = json!({ "parent_density": 0.05, "outage_targets": [0.1], "max_radius": 10.0, "grid_points": 41 });
    let (code, text) = run_to(dir.path(), "optimize-guard", &write_config(dir.path(), "g.json", &cfg), "g.csv", &[]);
    assert_eq!(code, 0);
    let r = CurveReport::parse(&text).unwrap();
    let radius: f64 = r.meta_value("outage_0.1_radius").unwrap().parse().unwrap();
    let eta: f64 = r.meta_value("outage_0.1_eta").unwrap().parse().unwrap();
    assert!(radius > 0.0 && radius < 10.0);
    let grid = r.column("eta_outage_0.1").unwrap();
    assert_eq!(grid.len(), 41);
    assert!(grid.iter().all(|v| v.unwrap() <= eta * (1.0 + 1e-12)));
}

#[test]
fn dump_realization_writes_points_inside_the_window() {
    let dir = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["model"] = json!({ "type": "disk_cluster", "center_distance": 30.0, "radius": 10.0, "density": 0.05 });
    cfg["trials"] = json!(5);
    let (code, text) = run_to(dir.path(), "dump-realization", &write_config(dir.path(), "d.json", &cfg), "d.csv", &[]);
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial_index,point_index,x,y"));
    let mut trials = std::collections::BTreeSet::new();
    let mut count = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        trials.insert(f[0] as u64);
        let d = ((f[2] - 30.0).powi(2) + f[3].powi(2)).sqrt();
        assert!(d <= 10.0 + 1e-9, "point outside the disk: {line}");
        count += 1;
    }
    // mean 0.05·π·100 ≈ 15.7 points per realization
    assert!(count > 20 && trials.iter().all(|t| *t < 5));
}
