use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn isomin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isomin")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_parabolic_catenoid() {
    let out = isomin(&["verify", "--surface", "parabolic-catenoid", "--t", "0.7"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let angle = &v["angles"][0];
    for key in ["m1", "m2", "m3", "e2"] {
        assert!(angle[key]["max"].as_f64().unwrap() < 1e-8, "{key}: {}", angle[key]);
    }
}

#[test]
fn verify_saearp_partner_angle() {
    let out = isomin(&["verify", "--surface", "saearp", "--l", "1", "--d", "2", "--angle", "nu_bar", "--grid", "41x41"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["angles"][0]["angle"], "nu_bar");
}

#[test]
fn roots_counts() {
    let out = isomin(&["roots", "--surface", "saearp", "--at", "0.4,0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["admissible"].as_array().unwrap().len(), 4);

    let out = isomin(&["roots", "--surface", "catenoid", "--beta", "2", "--at", "0.5,0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let admissible: Vec<f64> = json(&out)["admissible"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(admissible.len(), 2);
    assert_eq!(admissible[0], -admissible[1]);
}

#[test]
fn roots_on_a_constant_curvature_chart_is_degenerate() {
    let out = isomin(&["roots", "--surface", "horizontal-slice", "--c", "-1", "--at", "0.1,0.1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("degenerate: ∇K = 0"), "{}", stderr(&out));
}

#[test]
fn reconstruct_writes_a_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pc.obj");
    let out = isomin(&["reconstruct", "--surface", "parabolic-catenoid", "--grid", "101x101", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let member = &json(&out)["members"][0];
    assert!(member["report"]["mean_curvature"].as_f64().unwrap() < 5e-4);
    let mesh = std::fs::read_to_string(&path).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 101 * 101);
}

#[test]
fn associate_sweep_writes_every_member() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("member.csv");
    let out = isomin(&[
        "associate", "--surface", "parabolic-catenoid", "--grid", "101x101", "--thetas", "0:pi:8", "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let members = json(&out)["members"].as_array().unwrap().clone();
    assert_eq!(members.len(), 9);
    for (k, m) in members.iter().enumerate() {
        assert!(m["report"]["metric_error"].as_f64().unwrap() < 1e-5);
        assert!(Path::new(m["output"].as_str().unwrap()).ends_with(format!("member_{k:02}.csv")));
        assert!(dir.path().join(format!("member_{k:02}.csv")).exists());
    }
}

#[test]
fn domain_reaching_a_flat_point_is_an_evaluation_error() {
    let out = isomin(&["reconstruct", "--surface", "parabolic-catenoid", "--grid", "21x21", "--domain", "-1.57:1.57:-1:1"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("flat point"), "{}", stderr(&out));
}

#[test]
fn config_file_and_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let write = |m1: f64| {
        let body = serde_json::json!({
            "surface": { "fixture": "catenoid", "beta": 2.0 },
            "grid": { "nu": 21, "nv": 21 },
            "tolerances": { "m1": m1 }
        });
        std::fs::write(&cfg, body.to_string()).unwrap();
    };
    write(1e-8);
    let out = isomin(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["grid"], serde_json::json!([21, 21]));

    write(1e-300);
    let out = isomin(&["verify", "--config", cfg.to_str().unwrap(), "--surface", "saearp"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn report_json_goes_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = isomin(&[
        "reconstruct", "--surface", "parabolic-catenoid", "--grid", "101x101", "--format", "report-json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file, json(&out));
    assert_eq!(file["members"][0]["pass"], true);
}

#[test]
fn ricci_report() {
    let out = isomin(&["ricci", "--surface", "saearp", "--grid", "21x21"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(json(&out)["reduction_gap"]["max"].as_f64().unwrap() < 1e-12);
}

#[test]
fn bad_input_is_a_config_error() {
    assert_eq!(code(&isomin(&["verify", "--surface", "torus"])), 2);
    assert_eq!(code(&isomin(&["verify", "--grid", "3x3"])), 2);
    assert_eq!(code(&isomin(&["verify", "--surface", "unduloid", "--c", "-1"])), 2);
    assert_eq!(code(&isomin(&["frobnicate"])), 2);
    assert_eq!(code(&isomin(&["--help"])), 0);
}
