use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn run(args: &[&str], spec: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammareg"))
        .args(args)
        .arg("--spec")
        .arg(spec)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("t.spec");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_theorems_on_the_double_well() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "theorems"], &specs().join("double_well.spec"), out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(out.path().join("verify.json"));
    assert_eq!(r["schema"], 1);
    let run = &r["runs"][0];
    let checks = run["checks"].as_array().unwrap();
    for name in ["inf_gap", "set_gap"] {
        let c = checks.iter().find(|c| c["name"] == name).unwrap();
        assert_eq!(c["passed"], true);
    }
    let tol = &run["tolerances"];
    for key in ["delta_env", "eps_geom", "minimizer_tol"] {
        assert!(tol[key].is_number(), "{key}");
    }
    assert!(tol["delta_env"].as_f64().unwrap() <= 0.15);
    assert_eq!(run["spec"]["sha256"].as_str().unwrap().len(), 64);
    assert!(run["version"].is_string());
}

#[test]
fn malformed_spec_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "domain = box\nlower = 0\nupper = 1\nresolution = ten\nexpression = x\n");
    let o = run(&["envelope"], &spec, dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("resolution"), "{err}");
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.spec");
    assert_eq!(run(&["envelope"], &missing, dir.path()).status.code(), Some(1));
    assert_eq!(run(&["bauer"], &specs().join("double_well.spec"), dir.path()).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], &specs().join("double_well.spec"), dir.path()).status.code(), Some(1));
    let o = run(&["envelope", "--threads", "0"], &specs().join("double_well.spec"), dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_hypotheses_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "domain = box\nlower = -2\nupper = 2\nresolution = 40\nexpression = (x^2 - 1)^2\nh_plus = x\n",
    );
    let o = run(&["bauer"], &spec, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("h_minus"));
}

#[test]
fn spike_envelope_drops_below_the_spike() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["envelope"], &specs().join("spike.spec"), out.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.path().join("envelope.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,h,gamma_h"));
    let row: Vec<f64> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect::<Vec<f64>>())
        .find(|r| r[0] == 0.0)
        .unwrap();
    assert_eq!(row[1], 1.0);
    assert!(row[2] < row[1]);
    assert!(!csv.contains('\r'));
}

#[test]
fn reports_are_reproducible() {
    let spec = specs().join("double_well.spec");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for cmd in ["subdiff", "envelope", "minimizers", "measure"] {
        assert_eq!(run(&[cmd, "--threads", "1"], &spec, a.path()).status.code(), Some(0));
        assert_eq!(run(&[cmd, "--threads", "1"], &spec, b.path()).status.code(), Some(0));
        assert_eq!(run(&[cmd, "--threads", "4"], &spec, c.path()).status.code(), Some(0));
        for ext in ["csv", "json"] {
            let name = format!("{cmd}.{ext}");
            let x = std::fs::read(a.path().join(&name)).unwrap();
            assert_eq!(x, std::fs::read(b.path().join(&name)).unwrap(), "{name}");
            assert_eq!(x, std::fs::read(c.path().join(&name)).unwrap(), "{name} with 4 threads");
        }
    }
}

#[test]
fn every_command_writes_both_reports() {
    let out = tempfile::tempdir().unwrap();
    let cases = [
        ("conjugate", "parabola.spec"),
        ("envelope", "bowl2d.spec"),
        ("lsc-hull", "spike.spec"),
        ("minimizers", "sampled.spec"),
        ("subdiff", "affine.spec"),
        ("exhaust", "three_well.spec"),
        ("bauer", "triangle_bowl.spec"),
        ("measure", "three_well.spec"),
    ];
    for (cmd, spec) in cases {
        let o = run(&[cmd], &specs().join(spec), out.path());
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(out.path().join(format!("{cmd}.json")));
        assert_eq!(r["command"], cmd);
        assert!(out.path().join(format!("{cmd}.csv")).exists());
    }
}

#[test]
fn three_well_exhaustion_recovers_the_middle_well() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run(&["exhaust"], &specs().join("three_well.spec"), out.path()).status.code(), Some(0));
    let csv = std::fs::read_to_string(out.path().join("exhaust.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "recovered,0"), "{csv}");
}

#[test]
fn verify_passes_on_the_bundled_corpus() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["verify"], &specs(), out.path());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    let r = json(out.path().join("verify.json"));
    let runs = r["runs"].as_array().unwrap();
    assert!(runs.len() >= 10);
    for run in runs {
        for c in run["checks"].as_array().unwrap() {
            assert_eq!(c["passed"], true, "{}: {}", run["spec"]["name"], c);
        }
    }
}
