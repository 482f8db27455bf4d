use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wehrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wehrl"))
        .args(args)
        .env_remove("WEHRL_PARALLELISM")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = wehrl(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn write_cov(dir: &Path, name: &str, rows: &[Vec<f64>]) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(rows).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn tmss_cov(r: f64) -> Vec<Vec<f64>> {
    let c = (2.0 * r).cosh() / 2.0;
    let s = (2.0 * r).sinh() / 2.0;
    vec![
        vec![c, 0.0, s, 0.0],
        vec![0.0, c, 0.0, -s],
        vec![s, 0.0, c, 0.0],
        vec![0.0, -s, 0.0, c],
    ]
}

#[test]
fn eur_fock_small_table() {
    let doc = json(&["eur-fock", "--n-max", "2"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let bound = 1.0 + std::f64::consts::PI.ln();
    let gamma = 0.577_215_664_901_532_9;
    assert!((num(&rows[0], "wl_lhs") - bound).abs() < 1e-10);
    assert!((num(&rows[1], "wl_lhs") - (bound + gamma)).abs() < 1e-10);
    assert!((num(&rows[1], "bbm_lhs") - 2.685456).abs() < 1e-5);
    assert!((num(&rows[2], "bbm_lhs") - 2.997218).abs() < 1e-5);
    for row in rows {
        assert!(num(row, "wl_deficit") >= -1e-9);
        assert!(num(row, "bbm_deficit") >= -1e-9);
    }
}

#[test]
fn eur_fock_zero_is_one_row() {
    let out = wehrl(&["eur-fock", "--n-max", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
}

#[test]
fn eur_fock_large_n_with_asymptotics() {
    let doc = json(&["eur-fock", "--n-max", "50", "--asymptotics"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 51);
    let last = &rows[50];
    assert!((num(last, "bbm_lhs") - 5.313).abs() < 1e-3);
    assert!(last.get("wl_asymptote").is_some());
    assert!(last.get("bbm_asymptote").is_some());
}

#[test]
fn eur_mixture_endpoints() {
    let doc = json(&["eur-mixture", "--steps", "3"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // q = 1 is the vacuum, where every relation is tight.
    assert!(num(&rows[2], "wl_deficit").abs() < 1e-8);
    assert!(num(&rows[2], "bbm_deficit").abs() < 1e-8);
    // q = 0 is |1⟩.
    assert!((num(&rows[0], "wl_deficit") - 0.577_215_664_9).abs() < 1e-8);
    assert!(doc["crossover_q"].is_number());
}

#[test]
fn eur_thermal_grid() {
    let doc = json(&["eur-thermal", "--beta-min", "0.5", "--beta-max", "2", "--points", "3"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(num(&rows[0], "grid_param"), 0.5);
    assert_eq!(num(&rows[2], "grid_param"), 2.0);
    assert!((num(&rows[1], "grid_param") - 1.0).abs() < 1e-12);
}

#[test]
fn tmss_mutual_information() {
    let doc = json(&["bipartite-tmss", "--lambda-grid", "0,0.6"]);
    let rows = doc["rows"].as_array().unwrap();
    assert!(num(&rows[0], "i_w_numeric").abs() < 1e-10);
    assert!((num(&rows[1], "i_w_numeric") - 0.4463).abs() < 1e-4);
    assert!((num(&rows[1], "conditional_numeric") - 1.0).abs() < 1e-8);
    assert_eq!(rows[1]["bound_holds"], Value::Bool(true));
}

#[test]
fn gaussian_vacuum_and_tmss() {
    let dir = tempfile::tempdir().unwrap();
    let vac = vec![
        vec![0.5, 0.0, 0.0, 0.0],
        vec![0.0, 0.5, 0.0, 0.0],
        vec![0.0, 0.0, 0.5, 0.0],
        vec![0.0, 0.0, 0.0, 0.5],
    ];
    let vac_path = write_cov(dir.path(), "vac.json", &vac);
    let doc = json(&["gaussian", "--cov", &vac_path, "--partition", "1", "1"]);
    assert!((num(&doc, "wehrl_joint") - 2.0).abs() < 1e-10);
    assert!(num(&doc, "mutual").abs() < 1e-10);
    assert_eq!(doc["ppt_entangled"], Value::Bool(false));

    let tmss_path = write_cov(dir.path(), "tmss.json", &tmss_cov(0.5));
    let doc = json(&["gaussian", "--cov", &tmss_path, "--partition", "1", "1"]);
    assert_eq!(doc["admissible"], Value::Bool(true));
    assert_eq!(doc["ppt_entangled"], Value::Bool(true));
    let lambda = 0.5f64.tanh();
    assert!((num(&doc, "mutual") + (1.0 - lambda * lambda).ln()).abs() < 1e-8);
    assert!((num(&doc, "conditional") - 1.0).abs() < 1e-8);
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[1.0, 2.0], [3.0]]").unwrap();
    let out = wehrl(&["gaussian", "--cov", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let unphysical = write_cov(dir.path(), "small.json", &[vec![0.1, 0.0], vec![0.0, 0.1]]);
    assert_eq!(wehrl(&["gaussian", "--cov", &unphysical]).status.code(), Some(3));

    assert_eq!(wehrl(&["entropy", "--state", "{not json"]).status.code(), Some(3));
    assert_eq!(wehrl(&["eur-fock", "--n-max", "-1"]).status.code(), Some(3));
    assert_eq!(wehrl(&["bipartite-tmss", "--lambda-grid", "0.5,1.2"]).status.code(), Some(3));
    assert_eq!(wehrl(&["no-such-command"]).status.code(), Some(3));
}

#[test]
fn tolerance_failure_exits_2() {
    let out = wehrl(&[
        "entropy",
        "--state",
        r#"{"kind":"fock","n":30}"#,
        "--strategy",
        "polar-2d",
        "--radial-nodes",
        "8",
        "--angular-nodes",
        "8",
        "--max-doublings",
        "0",
        "--rel-tol",
        "1e-14",
        "--abs-tol",
        "1e-14",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn json_round_trip() {
    let out = wehrl(&["eur-fock", "--n-max", "3", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_vec_pretty(&doc).unwrap();
    let doc2: Value = serde_json::from_slice(&again).unwrap();
    assert_eq!(doc, doc2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command":{"name":"eur-fock","n_max":1},"format":"json"}"#).unwrap();
    let doc = json(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);

    let out = wehrl(&["--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("grid_param,"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = wehrl(&["eur-fock", "--n-max", "1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 3);
}

#[test]
fn output_is_deterministic_across_parallelism() {
    for args in [
        vec!["eur-mixture", "--steps", "5"],
        vec!["eur-fock", "--n-max", "6"],
        vec!["bipartite-tmss", "--lambda-grid", "0.2,0.7"],
    ] {
        let base = wehrl(&args).stdout;
        assert!(!base.is_empty());
        assert_eq!(base, wehrl(&args).stdout);
        let mut par = args.clone();
        par.extend(["--parallelism", "4"]);
        assert_eq!(base, wehrl(&par).stdout, "{args:?}");
    }
}
