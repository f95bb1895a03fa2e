use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn problem(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn two_point_disk_problem() {
    let out = polylab(&["pick-solve", &problem("disk_two_point.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["result"]["minimal_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["result"]["extremal"], Value::Bool(false));
}

#[test]
fn empty_and_malformed_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.json", r#"{"version":1,"kind":"disk_pick","payload":{"nodes":[],"targets":[]}}"#);
    assert_eq!(code(&polylab(&["pick-solve", &empty])), 1);
    let broken = write(dir.path(), "b.json", "{\"version\": 1, \"kind\": ");
    let out = polylab(&["pick-solve", &broken]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
    let wrong_kind = write(dir.path(), "w.json", r#"{"version":1,"kind":"variety","payload":{"builtin":"v0"}}"#);
    assert_eq!(code(&polylab(&["pick-solve", &wrong_kind])), 1);
    assert_eq!(code(&polylab(&["pick-solve", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&polylab(&["no-such-command"])), 1);
    assert_eq!(code(&polylab(&["--help"])), 0);
}

#[test]
fn tridisk_results_carry_the_caveat() {
    let out = polylab(&["pick-solve", &problem("poly_tridisk.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["caveat_flag"], Value::String("schur-agler-upper-bound".into()));
    let out = polylab(&["pick-solve", &problem("poly_diagonal.json")]);
    let v = stdout_json(&out);
    assert!(v["result"]["caveat_flag"].is_null());
    assert!((v["result"]["sa_norm"].as_f64().unwrap() - 1.4).abs() < 1e-4);
}

#[test]
fn certificates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["disk_two_point.json", "disk_with_derivative.json", "poly_diagonal.json", "poly_tridisk.json"] {
        let out = dir.path().join(format!("{name}.out"));
        assert_eq!(code(&polylab(&["pick-solve", &problem(name), "--out", s(&out)])), 0, "{name}");
        let text = std::fs::read_to_string(&out).unwrap();
        let check = polylab(&["check", s(&out)]);
        assert_eq!(code(&check), 0, "{name}: {}", String::from_utf8_lossy(&check.stderr));
        // Parsing and re-serializing reproduces every float bit for bit.
        let v: Value = serde_json::from_str(&text).unwrap();
        let again = polylab(&["pick-solve", &problem(name)]);
        assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), v);
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    polylab(&["pick-solve", &problem("poly_diagonal.json"), "--out", s(&out)]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    v["certificate"]["primal"]["t"] = Value::from(1.2);
    let bad = write(dir.path(), "bad.json", &v.to_string());
    assert_ne!(code(&polylab(&["check", &bad])), 0);
}

#[test]
fn v0_retract_and_scan() {
    let out = polylab(&["variety", "retract", "builtin:v0", "--resolution", "32"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "not_retract");
    let w = &v["witness"]["outcome"];
    assert_eq!(w["type"], "escapes");
    for root in w["roots"].as_array().unwrap() {
        let (re, im) = (root[0].as_f64().unwrap(), root[1].as_f64().unwrap());
        assert!(re.hypot(im) > 1.0);
    }
    let out = polylab(&["variety", "scan-balanced", "builtin:v0"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["count"].as_u64().unwrap() > 0);
    assert!(v["pairs"].as_array().unwrap().iter().all(|p| p["n"].as_u64().unwrap() >= 2));
}

#[test]
fn retract_graph_from_file() {
    let out = polylab(&["variety", "retract", &problem("variety_rational_inner.json"), "--resolution", "32"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["status"], "retract_graph");
}

#[test]
fn unknown_builtin_and_degenerate_direction() {
    assert_eq!(code(&polylab(&["variety", "sample", "builtin:w7"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "v.json",
        r#"{"version":1,"kind":"variety","payload":{"dim":3,"generators":[[{"exp":[0,0,1],"coef":[1,0]},{"exp":[2,0,0],"coef":[-0.5,0]}]]}}"#,
    );
    let out = polylab(&["variety", "graph", &f, "--pair", "0,2"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let empty = write(
        dir.path(),
        "e.json",
        r#"{"version":1,"kind":"variety","payload":{"dim":3,"generators":[[{"exp":[0,0,1],"coef":[1,0]},{"exp":[0,0,0],"coef":[2,0]}]]}}"#,
    );
    assert_eq!(code(&polylab(&["variety", "sample", &empty])), 3);
}

#[test]
fn csv_exports() {
    let out = polylab(&["variety", "sample", "builtin:v0", "--resolution", "5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "z1re,z1im,z2re,z2im,z3re,z3im");
    for line in lines {
        let x: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(x.len(), 6);
        assert!((x[4] - x[0] - x[2]).abs() < 1e-14 && (x[5] - x[1] - x[3]).abs() < 1e-14);
    }
    let out = polylab(&["variety", "graph", &problem("variety_cusp.json"), "--pair", "0,1", "--resolution", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "z1re,z1im,z2re,z2im,z3re,z3im,sheet");
    assert!(text.lines().skip(1).any(|l| l.ends_with(",1.0000000000000000e0")));
}

#[test]
fn exg1_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let out = polylab(&["experiment", "exg1", "--m", "0.9", "--out-dir", s(&a)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&a);
    assert_eq!(r["verdict"], "violation_detected");
    assert!(r["circle_gap"].as_f64().unwrap() > 0.05);
    assert!(r["eq_ex_lhs"].as_f64().unwrap() < r["eq_ex_rhs"].as_f64().unwrap());
    assert!(std::fs::read_to_string(a.join("report.txt")).unwrap().contains("verdict: violation_detected"));
    let b = dir.path().join("b");
    polylab(&["experiment", "exg1", "--m", "0.9", "--out-dir", s(&b)]);
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());

    assert_eq!(code(&polylab(&["experiment", "exg1", "--m", "0", "--out-dir", s(&a)])), 1);
    assert_eq!(code(&polylab(&["experiment", "exg1", "--m", "0.5", "--resolution", "2", "--out-dir", s(&a)])), 4);
}

#[test]
fn uniqueness_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = polylab(&[
        "experiment", "uniqueness-fit", "--alpha", "0.2", "--beta", "0.4i", "--gamma", "-0.3", "--out-dir", s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert!(r["residual"].as_f64().unwrap() < 1e-6);
    assert!(r["holdout_residual"].as_f64().unwrap() < 1e-5);
    assert_eq!(code(&polylab(&["experiment", "uniqueness-fit", "--alpha", "1.2", "--beta", "0", "--gamma", "0.1"])), 1);
}

#[test]
fn ext_vs_vn_writes_a_valid_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let out = polylab(&["experiment", "ext-vs-vn", "--samples", "50", "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["outcome"]["type"], "von_neumann_violation");
    assert!(r["outcome"]["vn"]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-6);
    let tuple = dir.path().join("tuple.json");
    assert_eq!(code(&polylab(&["check", s(&tuple)])), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&tuple).unwrap()).unwrap();
    v["payload"]["matrices"][0][0][0][0] = Value::from(0.123);
    let bad = write(dir.path(), "bad.json", &v.to_string());
    assert_eq!(code(&polylab(&["check", &bad])), 2);

    let e2 = dir.path().join("e2");
    let out = polylab(&["experiment", "ext-vs-vn", "--input", &problem("ext_vs_vn_v0.json"), "--out-dir", s(&e2)]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&e2)["outcome"]["type"], "extension_consistent");
}

#[test]
fn circle_image_on_a_retract() {
    let dir = tempfile::tempdir().unwrap();
    let out = polylab(&["experiment", "circle-image", "--input", &problem("circle_image_product.json"), "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["is_extremal_evidence"], Value::Bool(true));
    assert_eq!(r["omitted_arc"].as_f64().unwrap(), 0.0);
}

#[test]
fn shipped_problem_files_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems");
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            let out = polylab(&["check", p.to_str().unwrap()]);
            assert_eq!(code(&out), 0, "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
        }
    }
}
