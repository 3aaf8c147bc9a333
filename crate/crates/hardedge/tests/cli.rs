use std::path::Path;
use std::process::{Command, Output};

use hardedge::format::SystemDocument;
use serde_json::Value;

fn hardedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardedge"))
        .args(args)
        .env_remove("MB_PREC_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn wright_value_is_printed() {
    let o = hardedge(&["specfun", "--wright", "1,1", "--x", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("= 0.22389077914123566805"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(hardedge(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hardedge(&["verify", "--target", "sideways"]).status.code(),
        Some(1)
    );
    assert_eq!(
        hardedge(&[
            "verify",
            "--config",
            "/nonexistent/config.json",
            "--target",
            "kappa"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        hardedge(&["biortho", "--alpha", "-1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hardedge(&["verify", "--target", "kappa", "--n", "8,4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hardedge(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hardedge"))
        .args(["specfun", "--wright", "0.5,2", "--x", "0.3", "--out", out])
        .env("MB_PREC_BITS", "96")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&dir.path().join("specfun.json"));
    assert_eq!(doc["precision"]["mantissa_bits"], 96);
    let bad = Command::new(env!("CARGO_BIN_EXE_hardedge"))
        .args(["specfun", "--wright", "1,1", "--x", "1"])
        .env("MB_PREC_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"theta": 2, "alpha": 0.5, "potential": {"type": "monomial", "r": 2}, "n": [3, 5], "prec_bits": 96}"#).unwrap();
    let out = dir.path().join("out");
    let o = hardedge(&[
        "biortho",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc = read_json(&out.join("biortho.json"));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["theta"], 2.0);
    assert_eq!(doc["config"]["alpha"], 0.0);
    assert_eq!(doc["config"]["potential"]["type"], "monomial");
    assert_eq!(doc["config"]["n"], serde_json::json!([3, 5]));
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(out.join("biortho.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,j,kappa"));
    assert_eq!(lines.count(), 4 + 6);

    std::fs::write(&cfg, r#"{"theta": 2, "colour": "red"}"#).unwrap();
    assert_eq!(
        hardedge(&["biortho", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn cache_documents_rebuild_the_system() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let o = hardedge(&[
        "biortho",
        "--n",
        "4",
        "--theta",
        "1.5",
        "--prec-bits",
        "96",
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(&cache)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    let doc: SystemDocument = serde_json::from_slice(&std::fs::read(&entries[0]).unwrap()).unwrap();
    let sys = doc.to_system().unwrap();
    assert_eq!(sys.degree(), 4);
    assert!(sys.max_offdiag_residual().to_f64() < 1e-20);
}

#[test]
fn reports_carry_their_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = hardedge(&[
        "verify",
        "--target",
        "pn",
        "--n",
        "3,5",
        "--prec-bits",
        "128",
        "--out",
        out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("verify-pn.csv")).unwrap();
    assert!(csv.starts_with("n,error,ratio\n3,"));
    let doc = read_json(&dir.path().join("verify-pn.json"));
    assert_eq!(doc["result"]["n_values"], serde_json::json!([3, 5]));
    assert!(doc["result"]["predicted_rate"].as_f64().unwrap() < 0.0);

    let o = hardedge(&[
        "kernel",
        "--n",
        "2,3",
        "--x",
        "0.5",
        "--y",
        "0.8",
        "--prec-bits",
        "128",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
    assert!(csv.contains(",with_theta,") && csv.contains(",plain,"));

    let o = hardedge(&[
        "parametrix-check",
        "--theta",
        "1",
        "--alpha",
        "0",
        "--jmax",
        "2",
        "--family",
        "plain",
        "--rel-tol",
        "1e-12",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("parametrix-check: max"));
    let o = hardedge(&[
        "parametrix-check",
        "--theta",
        "1",
        "--alpha",
        "0",
        "--jmax",
        "1",
        "--family",
        "plain",
        "--tolerance",
        "0",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "a zero tolerance must fail the check"
    );
}

#[test]
fn equilibrium_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = hardedge(&[
        "equilibrium",
        "--theta",
        "1",
        "--potential",
        "linear",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&dir.path().join("equilibrium.json"));
    assert!((doc["result"]["b"].as_f64().unwrap() - 4.0).abs() < 1e-8);
    assert!((doc["result"]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}
