use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn flatopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatopt")).args(args).output().expect("binary runs")
}

fn run_in(dir: &tempfile::TempDir, command: &str, cfg: &std::path::Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()];
    args.extend_from_slice(extra);
    flatopt(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn crane_solve_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&dir, "crane-solve", &config("crane_bound_active.json"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let line = stdout(&out);
    assert!(line.contains("t1=") && line.contains("t2=") && line.contains("cost="), "{line}");
    let csv = fs::read_to_string(dir.path().join("crane_trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,y,dy,d2y,d3y,d4y,p_ref,theta_ref,F,segment_id\n"));
    assert_eq!(csv.lines().count(), 1502);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("crane_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["case"], "constrained");
    let t = summary["junction_times"].as_array().unwrap();
    assert!(t[0].as_f64().unwrap() < t[1].as_f64().unwrap());
}

#[test]
fn missing_field_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("crane_reference.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value.as_object_mut().unwrap().remove("p_max");
    let path = dir.path().join("broken.json");
    fs::write(&path, value.to_string()).unwrap();
    let out = run_in(&dir, "crane-solve", &path, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("p_max"), "{}", stderr(&out));
}

#[test]
fn obstacle_on_target_is_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("di.json");
    fs::write(
        &path,
        r#"{"p0":[-2,-2],"v0":[0,0],"pf":[1,2],"t0":0,"tf":10,"obstacle":{"center":[1,2],"clearance":0.5}}"#,
    )
    .unwrap();
    let out = run_in(&dir, "di-solve", &path, &[]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn unreadable_config_is_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&dir, "crane-solve", &dir.path().join("absent.json"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_flags_are_malformed() {
    assert_eq!(flatopt(&["crane-solve"]).status.code(), Some(1));
    assert_eq!(flatopt(&["launch"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("di_reference.json");
    for tol in ["bogus=1", "boundary=-1", "boundary", "boundary=x"] {
        let out = run_in(&dir, "verify", &cfg, &["--tol", tol]);
        assert_eq!(out.status.code(), Some(1), "--tol {tol}");
    }
}

#[test]
fn rerun_is_bit_identical() {
    for (cmd, cfg, csv) in [
        ("crane-solve", "crane_bound_active.json", "crane_trajectory.csv"),
        ("di-solve", "di_arc.json", "di_trajectory.csv"),
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(run_in(&a, cmd, &config(cfg), &[]).status.success());
        assert!(run_in(&b, cmd, &config(cfg), &[]).status.success());
        let x = fs::read(a.path().join(csv)).unwrap();
        let y = fs::read(b.path().join(csv)).unwrap();
        assert!(x == y, "{cmd} output differs between runs");
    }
}

#[test]
fn verify_writes_passing_reports() {
    for cfg in ["crane_bound_active.json", "di_reference.json", "di_arc.json"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_in(&dir, "verify", &config(cfg), &[]);
        assert_eq!(out.status.code(), Some(0), "{cfg}: {}", stderr(&out));
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("verification_report.json")).unwrap()).unwrap();
        let checks = report["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["pass"] == true), "{cfg}");
    }
}

#[test]
fn verify_exits_two_when_certificate_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&dir, "verify", &config("di_reference.json"), &["--tol", "boundary=1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("failed: boundary"));
}

#[test]
fn simulate_and_oracle_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&dir, "simulate", &config("crane_reference.json"), &["--dt", "0.01"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["sim_full.csv", "sim_small_angle.csv", "simulate_summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let out = run_in(&dir, "simulate", &config("crane_reference.json"), &["--dt", "0.007"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run_in(&dir, "oracle", &config("di_reference.json"), &["--samples", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("oracle_summary.json")).unwrap()).unwrap();
    assert!(summary["relative_gap"].as_f64().unwrap().abs() < 1e-4);
}

#[test]
fn unconverged_solve_exits_two() {
    // Head-on approach to an obstacle centred on the straight line: the
    // symmetric configuration has no preferred side.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("di.json");
    fs::write(
        &path,
        r#"{"p0":[-1.3,0],"v0":[0,0],"pf":[1.3,0],"t0":0,"tf":10,"obstacle":{"center":[0,0],"clearance":1.29}}"#,
    )
    .unwrap();
    let out = run_in(&dir, "di-solve", &path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("escalation"), "{}", stderr(&out));
}
