//! End-to-end tests of the `ftprl` binary: exit codes, JSON schema,
//! determinism, trace/config file handling, and the bound subcommand.

mod common;

use ftprl::*;
use std::path::Path;
use std::process::Command;

fn ftprl_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ftprl"))
}

fn write_file(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn stdout_json(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn run_diag_on_box_hand_regret() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    write_file(&trace, "# n=2 T=2\n1,1\n1,0\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--set",
            "box:-0.5..0.5,-0.5..0.5",
            "--trace",
            trace.to_str().unwrap(),
            "--epsilon-seed",
            "0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["learner"], "diag");
    assert_eq!(v["rounds"], 2);
    assert!((v["regret"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["cumulative_loss"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert!((v["comparator_loss"].as_f64().unwrap() + 1.5).abs() < 1e-12);
    for key in [
        "tracked_bound_BR",
        "closed_form_bound",
        "posthoc_bound",
        "kappa",
        "wall_time_ms",
    ] {
        assert!(v.get(key).is_some(), "missing field {key}");
    }
}

#[test]
fn empty_trace_zero_report() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("empty.csv");
    write_file(&trace, "# n=2 T=0\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "const",
            "--set",
            "l2ball:r=1;n=2",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["rounds"], 0);
    assert_eq!(v["regret"], 0.0);
    assert_eq!(v["kappa"], 0.0);
}

#[test]
fn unknown_learner_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    write_file(&trace, "# n=1 T=1\n1\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "momentum",
            "--set",
            "box:-1..1",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("momentum"));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("huge.csv");
    write_file(&trace, "# n=1 T=2\n1e200\n1e200\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--set",
            "box:-1..1",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_trace_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("bad.csv");
    write_file(&trace, "# n=2 T=2\n1,2\n3\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--set",
            "box:-1..1,-1..1",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn reports_are_deterministic_except_wall_time() {
    let run = || {
        let out = ftprl_bin()
            .args([
                "run",
                "--learner",
                "diag",
                "--set",
                "box:-0.5..0.5,-0.5..0.5,-0.5..0.5",
                "--generator",
                "randomsphere:n=3",
                "--seed",
                "11",
                "--rounds",
                "50",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut v = stdout_json(&out);
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn bound_subcommand_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    // sphere of diameter 2 with G_T = 2
    let trace = dir.path().join("sphere.csv");
    write_file(&trace, "# n=2 T=2\n1,0\n0,1\n");
    let out = ftprl_bin()
        .args([
            "bound",
            "--family",
            "const",
            "--set",
            "l2ball:r=1;n=2",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["bound"].as_f64().unwrap() - 4.0).abs() < 1e-9);

    // box with widths (1,1) and G = (4,1)
    let trace = dir.path().join("box.csv");
    write_file(&trace, "# n=2 T=2\n2,1\n0,0\n");
    let out = ftprl_bin()
        .args([
            "bound",
            "--family",
            "diag",
            "--set",
            "box:-0.5..0.5,-0.5..0.5",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["bound"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-9);

    // full-PSD family is only defined for balls and ellipsoids
    let out = ftprl_bin()
        .args([
            "bound",
            "--family",
            "full",
            "--set",
            "box:-0.5..0.5,-0.5..0.5",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr)
        .contains("full-PSD post-hoc supported only for L2 balls/ellipsoids"));
}

#[test]
fn compare_emits_reports_and_ellipsoid_bound_pair() {
    let out = ftprl_bin()
        .args([
            "compare",
            "--learner",
            "const,scale",
            "--set",
            "ellipsoid:diag=1,2",
            "--generator",
            "randomsphere:n=2",
            "--seed",
            "3",
            "--rounds",
            "40",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["learner"], "const");
    assert_eq!(reports[1]["learner"], "scale");
    let pair = &v["bound_pair"];
    let direct = pair["direct_const_bound"].as_f64().unwrap();
    let transformed = pair["transformed_bound"].as_f64().unwrap();
    assert!(transformed <= direct + 1e-9);
}

#[test]
fn compare_identical_learners_agree() {
    let out = ftprl_bin()
        .args([
            "compare",
            "--learner",
            "diag",
            "--learner",
            "diag",
            "--set",
            "box:-1..1,-1..1",
            "--generator",
            "randomsphere:n=2",
            "--seed",
            "5",
            "--rounds",
            "30",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let reports = v["reports"].as_array().unwrap();
    let mut a = reports[0].clone();
    let mut b = reports[1].clone();
    a.as_object_mut().unwrap().remove("wall_time_ms");
    b.as_object_mut().unwrap().remove("wall_time_ms");
    assert_eq!(a, b);
}

#[test]
fn gen_then_run_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("gen.csv");
    let out = ftprl_bin()
        .args([
            "gen",
            "--generator",
            "heavytail:alpha=1.5;n=4",
            "--seed",
            "9",
            "--rounds",
            "25",
            "--out",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed = read_trace(&trace).unwrap();
    assert_eq!((parsed.n(), parsed.rounds()), (4, 25));

    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--set",
            "box:-0.5..0.5,-0.5..0.5,-0.5..0.5,-0.5..0.5",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["rounds"], 25);
    assert!(v["kappa"].as_f64().unwrap() <= 2f64.sqrt() + 1e-6);
}

#[test]
fn per_round_csv_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rounds.csv");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "const",
            "--set",
            "l2ball:r=1;n=2",
            "--generator",
            "randomsphere:n=2",
            "--seed",
            "2",
            "--rounds",
            "100",
            "--per-round-csv",
            csv.to_str().unwrap(),
            "--sample-every",
            "10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,loss,regret,B_R");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    assert!(rows[0].starts_with("10,"));
    assert!(rows[9].starts_with("100,"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    write_file(
        &cfg,
        "learner = const\nset = l2ball:r=1;n=2\ngenerator = randomsphere:n=2\nseed = 4\nrounds = 20\n",
    );
    let out = ftprl_bin()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["learner"], "const");

    // flag wins over the file
    let out = ftprl_bin()
        .args([
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--learner",
            "ogd",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["learner"], "ogd");

    // bad-family generator implies its own box
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--generator",
            "badfamily",
            "--seed",
            "1",
            "--rounds",
            "64",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn set_trace_dimension_mismatch_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    write_file(&trace, "# n=3 T=1\n1,2,3\n");
    let out = ftprl_bin()
        .args([
            "run",
            "--learner",
            "diag",
            "--set",
            "box:-1..1,-1..1",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
