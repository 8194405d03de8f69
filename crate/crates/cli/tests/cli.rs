use std::path::Path;
use std::process::{Command, Output};

use polyrigid::report::AnalysisReport;
use serde_json::Value;

fn polyrigid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyrigid")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn octahedron_passes_from_every_apex() {
    let out = polyrigid(&["analyze", "--generate", "octa"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["outcome"]["pass"], true);
    let apices = r["apices"].as_array().unwrap();
    assert_eq!(apices.len(), 6);
    for a in apices {
        assert_eq!(a["judged"], true);
        let ev = a["lambda"]["eigenvalues"].as_array().unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].as_f64().unwrap() - 4.0).abs() < 1e-6);
    }
}

#[test]
fn exit_codes_follow_the_failure_class() {
    assert_eq!(code(&polyrigid(&["analyze", "--generate", "tetra"])), 0);
    let flat = polyrigid(&["analyze", "--generate", "flat_vertex_tetra"]);
    assert_eq!(code(&flat), 1);
    assert_eq!(json(&flat)["rigidity"]["kernel_dim"], 7);
    assert_eq!(code(&polyrigid(&["analyze", "--generate", "octa", "--apex", "9"])), 2);
    assert_eq!(code(&polyrigid(&["analyze", "--generate", "no_such_shape"])), 2);
    assert_eq!(code(&polyrigid(&["analyze", "--generate", "octa", "--tol-eig", "-1"])), 2);
    assert_eq!(code(&polyrigid(&["analyze", "--generate", "pyramid_hat"])), 2);
    assert_eq!(code(&polyrigid(&["analyze", "--input", "/nonexistent/mesh.off"])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["hat", "--generate", "star_pullback", "--seed", "7", "--complete", "--homotopy", "0,0.5,0.9"];
    let a = polyrigid(&args);
    let b = polyrigid(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    let steps = r["hat"]["completion"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    for s in steps {
        assert_eq!(s["rank_one_psd"], true);
        assert!(s["update_residual"].as_f64().unwrap() < 2e-6);
    }
    assert_eq!(r["homotopy"]["constant"], true);
}

#[test]
fn generated_off_analyzes_like_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("pullback.off");
    let gen = polyrigid(&["generate", "star_pullback", "--seed", "4", "--format", "off", "--out", path(&off)]);
    assert_eq!(code(&gen), 0);
    let from_file = json(&polyrigid(&["analyze", "--input", path(&off), "--apex", "11"]));
    let from_gen = json(&polyrigid(&["analyze", "--generate", "star_pullback", "--seed", "4", "--apex", "11"]));
    assert_eq!(from_file["outcome"]["exit_code"], 0);
    assert_eq!(from_file["apices"], from_gen["apices"]);
    assert_eq!(from_file["rigidity"], from_gen["rigidity"]);
    assert_eq!(from_file["input"]["kind"], "file");
}

#[test]
fn report_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = polyrigid(&["hat", "--generate", "excavated_hat:k=3", "--seed", "2", "--complete", "--out", path(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let report: AnalysisReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.to_json() + "\n", text);
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["hat"]["convex"], false);
    assert_eq!(value["hat"]["completion"]["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn hat_off_output_is_a_disk() {
    let out = polyrigid(&["hat", "--generate", "icosa", "--apex", "0", "--format", "off"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(counts[..2], [11, 15]);
}

#[test]
fn schema_lists_report_fields() {
    let out = polyrigid(&["report-schema"]);
    assert_eq!(code(&out), 0);
    let schema = json(&out);
    let report = json(&polyrigid(&["analyze", "--generate", "tetra"]));
    for key in report.as_object().unwrap().keys() {
        assert!(schema["fields"].get(key).is_some(), "schema misses {key}");
    }
}
