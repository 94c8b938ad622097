//! End-to-end checks of the `hll` binary: outputs, determinism, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

/// `relH1Semi` of `solve --modulus 1 --alpha-tilde 1 --p 1 --level 2`, frozen
/// from the first run.
const SOLVE_REL_H1_SEMI: f64 = 0.125_486_171_131_617_5;

fn hll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hll"))
        .args(args)
        .env("HLL_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn solve_matches_regression_constant_and_is_deterministic() {
    let args = [
        "solve",
        "--modulus",
        "1",
        "--alpha-tilde",
        "1",
        "--p",
        "1",
        "--level",
        "2",
    ];
    let a = hll(&args);
    let b = hll(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a.stdout);
    let rel = v["error"]["relH1Semi"].as_f64().unwrap();
    assert!((rel - SOLVE_REL_H1_SEMI).abs() < 1e-12 * SOLVE_REL_H1_SEMI, "{rel}");
    assert_eq!(v["dof"], 61);
    let stab = &v["stability"];
    let gamma = stab["gammaDisc"].as_f64().unwrap();
    let cont = stab["continuityNorm"].as_f64().unwrap();
    let cb = stab["cbEstimate"].as_f64().unwrap();
    assert!((gamma - 1.0).abs() < 1e-10);
    assert!(cont <= 1.0 + cb + 1e-8);
    assert!(v["quasiOptRatio"].as_f64().unwrap() >= 1.0);
}

#[test]
fn solve_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let out = hll(&[
        "solve",
        "--modulus",
        "10",
        "--alpha-tilde",
        "0.25",
        "--p",
        "2",
        "--level",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&fs::read(&path).unwrap());
    assert!(v["imZeta"].as_f64().unwrap() > 0.0);
    assert!(v["error"]["relL2"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_and_admissibility_errors_exit_two() {
    for args in [
        vec!["solve", "--modulus", "0.5"],
        vec!["solve", "--modulus", "10", "--p", "9"],
        vec!["solve", "--modulus", "10", "--alpha-tilde", "1.5"],
        vec!["solve", "--modulus", "10", "--level", "42"],
        vec!["solve", "--no-such-flag"],
        vec!["frobnicate"],
        vec!["symbol-check", "--im-zeta", "0"],
        vec!["symbol-check", "--im-zeta", "1", "--lambda", "0.5"],
        vec!["eta-estimate", "--modulus", "10", "--eta-samples", "0"],
    ] {
        let out = hll(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_thread_count_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_hll"))
        .args(["symbol-check", "--im-zeta", "1"])
        .env("HLL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

fn run_study(dir: &Path, config: &str) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    hll(&[
        "study",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn small_study_is_byte_identical_across_runs() {
    let config = r#"{"moduli":[1,50],"alphaTilde":[0,1],"degrees":[1,2],"levels":[0,1,2],"etaSamples":2}"#;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&run_study(a.path(), config)), 0);
    assert_eq!(code(&run_study(b.path(), config)), 0);
    let sa = fs::read_to_string(a.path().join("study.csv")).unwrap();
    let sb = fs::read_to_string(b.path().join("study.csv")).unwrap();
    assert_eq!(sa, sb);
    let mut lines = sa.lines();
    assert_eq!(
        lines.next().unwrap(),
        "modulus,alphaTilde,p,level,dof,nPerWavelength,relH1Semi,relL2,relWeighted,gammaDisc,continuityNorm,\
         cbEstimate,etaHat,quasiOptRatio,resolutionLhs,status"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 2 * 3);
    assert!(rows.iter().all(|r| r.len() == 16 && r[15] == "ok"));
    let timing = fs::read_to_string(a.path().join("study_timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), rows.len() + 1);
}

#[test]
fn invalid_study_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        r#"{"moduli":[0.5]}"#,
        r#"{"degrees":[0]}"#,
        r#"{"colour":"red"}"#,
        "not json",
    ] {
        assert_eq!(code(&run_study(dir.path(), bad)), 2, "{bad}");
    }
}

#[test]
fn infsup_scan_calibrates_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.json");
    fs::write(
        &cfg,
        r#"{"moduli":[1,10,100],"alphaTilde":[0,0.25,1],"degrees":[1,2],"levels":[0,1]}"#,
    )
    .unwrap();
    let csv = dir.path().join("infsup.csv");
    let out = hll(&[
        "infsup-scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert!((v["calibrationGamma"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v["allCoercivePass"], true);
    assert!(v["fittedCRobust"].as_f64().unwrap().is_finite());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 3 * 2 * 2);
    // rows with Re ζ > 0 carry a pass flag; the purely imaginary rows do not
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let re: f64 = f[2].parse().unwrap();
        assert_eq!(f[12], if re > 0.0 { "pass" } else { "" }, "{line}");
    }
}

#[test]
fn symbol_check_writes_grid_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("symbol.csv");
    let out = hll(&["symbol-check", "--s-count", "12", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_eq!(v["plainBoundHolds"], true);
    assert_eq!(v["firstBoundHolds"], true);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "reZeta,imZeta,s,absSigma,bound0,bound1,bound2,margin"
    );
    // 20 frequencies, 12 grid points plus the threshold point each
    assert_eq!(text.lines().count(), 1 + 20 * 13);
    let again = hll(&["symbol-check", "--s-count", "12", "--out", csv.to_str().unwrap()]);
    assert_eq!(text, fs::read_to_string(&csv).unwrap());
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn eta_estimate_reports_resolution_terms() {
    let out = hll(&[
        "eta-estimate",
        "--modulus",
        "10",
        "--alpha-tilde",
        "0",
        "--p",
        "2",
        "--level",
        "1",
        "--eta-samples",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    let eta = v["etaHat"].as_f64().unwrap();
    assert!(eta > 0.0);
    assert!((v["resolutionLhs"].as_f64().unwrap() - 10.0 * eta).abs() < 1e-12 * eta * 10.0);
    assert!(v["referenceDof"].as_u64().unwrap() > v["dof"].as_u64().unwrap());
}
