//! End-to-end checks of the binary: deterministic reports, exit codes, and
//! the documented subcommand surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flagframes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("flagframes-test-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

fn conic_json(n: usize, t0: f64, dt: f64) -> String {
    let at = |f: &dyn Fn(f64) -> String| -> String {
        (0..n)
            .map(|i| f(t0 + i as f64 * dt))
            .collect::<Vec<_>>()
            .join(",")
    };
    let values = at(&|t| format!("[1.0, {t}, {}]", t * t));
    let d1 = at(&|t| format!("[0.0, 1.0, {}]", 2.0 * t));
    let d2 = at(&|_| "[0.0, 0.0, 2.0]".to_string());
    let d3 = at(&|_| "[0.0, 0.0, 0.0]".to_string());
    format!(
        "{{\"k\": 2, \"t0\": {t0}, \"dt\": {dt}, \"values\": [{values}], \
         \"derivatives\": [[{d1}],[{d2}],[{d3}]]}}"
    )
}

#[test]
fn g2_report_is_deterministic_and_correct() {
    let a = run(&["g2", "report", "--case", "P2-orbit2"]);
    let b = run(&["g2", "report", "--case", "P2-orbit2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical reports");
    let text = String::from_utf8(a.stdout).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["sg_dim"], 5);
    assert_eq!(json["w_labels"][0], "X[a1]");
    assert_eq!(json["w_labels"][1], "X[2a1+3a2]");
}

#[test]
fn ode_analyze_is_deterministic() {
    let args = [
        "ode", "analyze", "--order", "3", "--f", "y", "--t0", "0", "--t1", "0.5", "--dt", "0.01",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(json["kind"], "none");
    let theta = json["invariant_maxima"][0][1].as_f64().unwrap();
    assert!((theta - 6.0).abs() < 0.01);
}

#[test]
fn invariants_on_flat_conic() {
    let path = tmp("conic.json", &conic_json(200, -0.5, 0.005));
    let out = run(&["invariants", "--curve", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,theta_3");
    for line in lines {
        let theta: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(theta.abs() <= 1e-8, "theta_3 = {theta}");
    }
    std::fs::remove_file(path).ok();
}

#[test]
fn algebra_json_feeds_symmetry() {
    let out = run(&["algebra", "--kind", "sl", "--blocks", "1,1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let path = tmp("sl3.json", &text);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let labels: Vec<String> = json["basis_labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    // principal x = E[1,0] + E[2,1]
    let coeffs: Vec<String> = labels
        .iter()
        .map(|l| {
            if l == "E[1,0]" || l == "E[2,1]" {
                "1".to_string()
            } else {
                "0".to_string()
            }
        })
        .collect();
    let out = run(&[
        "symmetry",
        "--algebra",
        path.to_str().unwrap(),
        "--x",
        &coeffs.join(","),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["dimension"], 3);
    assert_eq!(json["reductive"], true);

    let out = run(&[
        "complement",
        "--algebra",
        path.to_str().unwrap(),
        "--x",
        &coeffs.join(","),
        "--invariant",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["outcome"], "exists");
    assert_eq!(json["dimension"], 1);

    let out = run(&[
        "cohom",
        "--algebra",
        path.to_str().unwrap(),
        "--x",
        &coeffs.join(","),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["dimension"], 1);
    std::fs::remove_file(path).ok();
}

#[test]
fn bad_input_exits_2() {
    let out = run(&["algebra", "--kind", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["g2", "report", "--case", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["ode", "analyze", "--order", "2", "--f", "y"]);
    assert_eq!(out.status.code(), Some(2));
    // too-small grid
    let path = tmp("tiny.json", &conic_json(8, 0.0, 0.01));
    let out = run(&["invariants", "--curve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn malformed_derivative_arrays_exit_2() {
    // derivative rows of the wrong width must error, not panic
    let json = format!(
        "{{\"k\": 2, \"t0\": 0.0, \"dt\": 0.01, \"values\": [{}], \"derivatives\": [[{}],[{}],[{}]]}}",
        (0..20).map(|i| format!("[1.0, {}.0, 4.0]", i)).collect::<Vec<_>>().join(","),
        (0..20).map(|_| "[0.0, 1.0]".to_string()).collect::<Vec<_>>().join(","),
        (0..20).map(|_| "[0.0, 0.0, 0.0]".to_string()).collect::<Vec<_>>().join(","),
        (0..20).map(|_| "[0.0, 0.0, 0.0]".to_string()).collect::<Vec<_>>().join(","),
    );
    let path = tmp("badcurve.json", &json);
    let out = run(&["invariants", "--curve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn rank_ambiguity_exits_3() {
    // a conic sampled on a vanishingly small window: the bilinear system
    // collapses to the conditions at a single point and the kernel blows up
    let path = tmp("dup.json", &conic_json(20, 0.3, 1e-9));
    let out = run(&["duality", "bilinear", "--curve", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_file(path).ok();
}

#[test]
fn duality_reports_forms() {
    let path = tmp("conic2.json", &conic_json(128, -0.5, 0.01));
    let out = run(&["duality", "bilinear", "--curve", path.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["compatible"], true);
    assert_eq!(json["form"]["parity"], "symmetric");
    std::fs::remove_file(path).ok();
}

#[test]
fn invariants_fix_parameter_reports_tau() {
    // tan-reparametrized conic with exact jets: flat, with a nontrivial
    // projective parameter
    let n = 120;
    let t0 = 0.1f64;
    let dt = 0.005f64;
    let mut vals = Vec::new();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    let mut d3 = Vec::new();
    for i in 0..n {
        let t = t0 + i as f64 * dt;
        let s = t.tan();
        let c2 = 1.0 + s * s;
        vals.push(format!("[1.0, {s}, {}]", s * s));
        d1.push(format!("[0.0, {c2}, {}]", 2.0 * s * c2));
        d2.push(format!("[0.0, {}, {}]", 2.0 * s * c2, (2.0 + 6.0 * s * s) * c2));
        d3.push(format!(
            "[0.0, {}, {}]",
            (2.0 + 6.0 * s * s) * c2,
            (16.0 * s + 24.0 * s * s * s) * c2
        ));
    }
    let json = format!(
        "{{\"k\": 2, \"t0\": {t0}, \"dt\": {dt}, \"values\": [{}], \"derivatives\": [[{}],[{}],[{}]]}}",
        vals.join(","),
        d1.join(","),
        d2.join(","),
        d3.join(",")
    );
    let path = tmp("tanconic.json", &json);
    let mut csv_path = std::env::temp_dir();
    csv_path.push(format!("flagframes-test-{}-tau.csv", std::process::id()));
    let out = run(&[
        "invariants",
        "--curve",
        path.to_str().unwrap(),
        "--fix-parameter",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let (lo, hi) = (
        json["tau_range"][0].as_f64().unwrap(),
        json["tau_range"][1].as_f64().unwrap(),
    );
    assert!(hi > lo, "tau must increase: {lo} .. {hi}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("t,tau,theta_3_tau"));
    std::fs::remove_file(path).ok();
    std::fs::remove_file(csv_path).ok();
}

#[test]
fn complement_certificate_none_for_f24() {
    let out = run(&["algebra", "--kind", "sl", "--blocks", "2,2,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let path = tmp("sl5.json", &text);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let labels: Vec<String> = json["basis_labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let coeffs: Vec<String> = labels
        .iter()
        .map(|l| {
            if l == "E[2,0]" || l == "E[3,1]" || l == "E[4,3]" {
                "1".to_string()
            } else {
                "0".to_string()
            }
        })
        .collect();
    let out = run(&[
        "complement",
        "--algebra",
        path.to_str().unwrap(),
        "--x",
        &coeffs.join(","),
        "--invariant",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["outcome"], "none");
    assert!(json["witness"]["torus_dim"].as_u64().unwrap() >= 2);
    std::fs::remove_file(path).ok();
}

#[test]
fn ode_csv_and_summary() {
    let mut csv_path = std::env::temp_dir();
    csv_path.push(format!("flagframes-test-{}-theta.csv", std::process::id()));
    let out = run(&[
        "ode", "analyze", "--order", "4", "--f", "0", "--t1", "0.5", "--dt", "0.01", "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json["kind"], "symplectic");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("t,theta_3,theta_4"));
    std::fs::remove_file(csv_path).ok();
}
