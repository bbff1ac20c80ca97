use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn anosov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anosov"))
        .args(args)
        .output()
        .expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn shear(dir: &Path, name: &str, t: f64, x: [f64; 2]) -> String {
    let text = format!(
        r#"{{"X": [{}, {}], "Z": [1, 1, 1], "W": [1, 1, 1], "mode": "shear", "t": {t}}}"#,
        x[0], x[1]
    );
    write(dir, name, &text).to_str().unwrap().to_string()
}

#[test]
fn pressure_of_zero_potential() {
    let abc = anosov(&["pressure", "--builtin", "abc"]);
    assert_eq!(abc.status.code(), Some(0));
    assert!((json(&abc)["pressure"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-10);
    let std = anosov(&["pressure", "--builtin", "standard"]);
    assert!((json(&std)["pressure"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-10);
}

#[test]
fn pressure_with_graph_and_weights_files() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"vertices": ["s", "x"], "start": "s", "edges": [
            {"from": "s", "to": "x", "label": "a"},
            {"from": "x", "to": "x", "label": "a"},
            {"from": "x", "to": "x", "label": "b"}]}"#,
    );
    let w = write(dir.path(), "w.json", "[0.0, 0.5, -0.25]");
    let out = anosov(&[
        "pressure",
        "--graph",
        g.to_str().unwrap(),
        "--weights",
        w.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let want = (0.5f64.exp() + (-0.25f64).exp()).ln();
    assert!((json(&out)["pressure"].as_f64().unwrap() - want).abs() < 1e-10);

    let short = write(dir.path(), "short.json", "[0.0]");
    let out = anosov(&[
        "pressure",
        "--graph",
        g.to_str().unwrap(),
        "--weights",
        short.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"vertices\": [");
    assert_eq!(
        anosov(&["pressure", "--graph", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let cfg = write(dir.path(), "cfg.json", r#"{"epsilon": 0.1, "bogus": 1}"#);
    assert_eq!(
        anosov(&["--config", cfg.to_str().unwrap(), "sweep"]).status.code(),
        Some(2)
    );
    assert_eq!(anosov(&["sweep", "--epsilon", "3"]).status.code(), Some(2));
    assert_eq!(anosov(&["sweep", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(anosov(&["pants-exponent"]).status.code(), Some(2));
}

#[test]
fn pants_exponent_record() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 6.0, [1.0, 1.0]);
    let out = anosov(&["pants-exponent", "--params", &p]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let (lo, hi) = (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap());
    let b2 = r["depth_k"].as_f64().unwrap();
    assert!(lo <= b2 && b2 <= hi);
    assert_eq!(r["admissible"], true);
    assert_eq!(r["certified"], true);
    assert_eq!(r["bounds_valid"], true);
    assert!((r["scalar_residual"].as_f64().unwrap() - 0.03125).abs() < 1e-6);
    assert!((r["transfer_root"].as_f64().unwrap() - r["h_lambda"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn pants_exponent_flags_invalid_bounds() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 6.0, [1.0, 1.0]);
    let r = json(&anosov(&["pants-exponent", "--params", &p, "--epsilon", "0.5"]));
    assert_eq!(r["certified"], false);
    assert_eq!(r["bounds_valid"], false);
    assert!(r["certificate"]["failure"].is_string());
}

#[test]
fn inadmissible_params_suppress_closed_forms() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 3.0, [1.0, 1e-4]);
    let out = anosov(&["pants-exponent", "--params", &p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["admissible"], false);
    assert!(r["transfer_root"].is_null() && r["scalar_residual"].is_null());
}

#[test]
fn nonpositive_phi_exits_3() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 0.0, [1.0, 1.0]);
    assert_eq!(anosov(&["pants-exponent", "--params", &p]).status.code(), Some(3));
    let q = shear(dir.path(), "q.json", 4.0, [1.0, 1.0]);
    let out = anosov(&["pants-exponent", "--params", &q, "--phi", "raw:0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_csv_is_deterministic_and_ordered() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        r#"{"grid": {"t0": 0, "t1": 6, "steps": 4}, "compare_x": [2, 3], "out": "rows.csv"}"#,
    );
    let run = || {
        let out = anosov(&["--config", cfg.to_str().unwrap(), "sweep"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(dir.path().join("rows.csv")).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    let mut rdr = csv::Reader::from_reader(a.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "t",
            "h_kappa",
            "h_lambda",
            "transfer_root",
            "periodic_n",
            "depth_k",
            "brute_force",
            "cert_epsilon",
            "thurston_vs_base",
            "error"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let ts: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ts, [0.0, 2.0, 4.0, 6.0]);
    assert!(!rows[0][9].is_empty() && rows[0][1].is_empty());
    let th: Vec<f64> = rows[1..].iter().map(|r| r[8].parse().unwrap()).collect();
    assert!(th.windows(2).all(|w| w[1] < w[0]), "{th:?}");
    let ratio: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap() / r[3].parse::<f64>().unwrap())
        .collect();
    assert!(ratio.windows(2).all(|w| w[0] < w[1]), "{ratio:?}");
    assert!(rows.iter().all(|r| r[6].is_empty()));
}

#[test]
fn sweep_with_budget_fills_brute_force() {
    let out = anosov(&[
        "sweep", "--t0", "4", "--t1", "4", "--steps", "1", "--budget", "20000", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)[0];
    let (bf, hk) = (r["brute_force"].as_f64().unwrap(), r["h_kappa"].as_f64().unwrap());
    assert!((bf - hk).abs() / hk < 0.2, "{bf} {hk}");
}

#[test]
fn sweep_with_only_failing_rows_exits_3() {
    let out = anosov(&["sweep", "--t0", "0", "--t1", "0", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certify_audit_is_seeded() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 5.0, [1.0, 1.0]);
    let a = anosov(&["certify", "--params", &p, "--seed", "7", "--samples", "200"]);
    let b = anosov(&["certify", "--params", &p, "--seed", "7", "--samples", "200"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["certificate"]["passed"], true);
    assert_eq!(r["violations"], 0);
    assert_eq!(r["audit"].as_array().unwrap().len(), 12);
}

#[test]
fn certify_schottky_representation_file() {
    let dir = TempDir::new().unwrap();
    let (e, f) = (3f64.exp(), (-3f64).exp());
    let (p, q) = ((e + f) / 2.0, (e - f) / 2.0);
    let text = format!(r#"{{"n": 2, "generators": {{"a": [[{e}, 0], [0, {f}]], "b": [[{p}, {q}], [{q}, {p}]]}}}}"#);
    let rep = write(dir.path(), "rep.json", &text);
    let out = anosov(&[
        "certify",
        "--representation",
        rep.to_str().unwrap(),
        "--builtin",
        "standard",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["certificate"]["passed"], true);
    assert_eq!(r["violations"], 0);
}

#[test]
fn thurston_between_slices() {
    let dir = TempDir::new().unwrap();
    let p = shear(dir.path(), "p.json", 4.0, [1.0, 1.0]);
    let q = shear(dir.path(), "q.json", 4.0, [2.0, 3.0]);
    let out = anosov(&["thurston", "--params", &p, "--compare", &q, "--max-len", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["value"].as_f64().unwrap() > 0.0);
    assert_eq!(r["max_len"], 6);
}

#[test]
fn validate_coding() {
    let ok = anosov(&["validate-coding", "--builtin", "abc", "--depth", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["passed"], true);
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"vertices": ["s", "x"], "start": "s", "edges": [
            {"from": "s", "to": "x", "label": "a"},
            {"from": "x", "to": "x", "label": "a"},
            {"from": "x", "to": "x", "label": "a'"}]}"#,
    );
    let bad = anosov(&["validate-coding", "--graph", g.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["passed"], false);
}

#[test]
fn csv_format_for_single_records() {
    let out = anosov(&["pressure", "--builtin", "standard", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "edges,iterations,perron_root,pressure,recurrent_edges,residual"
    );
    assert!(lines.next().unwrap().contains("1.0986122886681098e0"));
}
