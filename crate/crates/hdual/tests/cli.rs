//! Black-box checks of the command-line tool: exit codes, determinism,
//! and the gen/dualize file-level duality.

use std::path::Path;
use std::process::{Command, Output};

fn hdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdual"))
        .args(args)
        .env_remove("HDUAL_SEED")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn gen_then_dualize_equals_dual_method() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("ogm.json");
    let b = dir.path().join("dual.json");
    let c = dir.path().join("ogmg.json");
    assert!(hdual(&["gen", "ogm", "--n", "12", "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(hdual(&[
        "dualize",
        "--input",
        a.to_str().unwrap(),
        "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    assert!(hdual(&["gen", "ogmg", "--n", "12", "--out", c.to_str().unwrap()])
        .status
        .success());
    assert_eq!(read(&b), read(&c));

    // dualizing twice returns the original file byte for byte
    let d = dir.path().join("back.json");
    hdual(&["dualize", "--input", b.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(read(&a), read(&d));
}

#[test]
fn gd_is_a_dualize_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("gd.json");
    let b = dir.path().join("gd_dual.json");
    hdual(&["gen", "gd", "--n", "9", "--h", "0.5", "--out", a.to_str().unwrap()]);
    hdual(&["dualize", "--input", a.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(read(&a), read(&b));
}

#[test]
fn runs_are_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = dir.path().join("a.csv");
    let t2 = dir.path().join("b.csv");
    let mut outs = Vec::new();
    for p in [&t1, &t2] {
        let o = hdual(&[
            "run", "--method", "ogm", "--n", "20", "--seed", "5", "--d", "8", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outs.push(o.stdout);
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(read(&t1), read(&t2));
}

#[test]
fn seed_env_var_wins() {
    let with_flag = hdual(&["run", "--method", "gd", "--n", "5", "--seed", "11"]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_hdual"))
        .args(["run", "--method", "gd", "--n", "5", "--seed", "3"])
        .env("HDUAL_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn verify_reports_pass_and_exits_zero() {
    let o = hdual(&["verify", "--method", "obl-f", "--n", "15", "--kind", "c1"]);
    assert!(o.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["kind"], "C1");
    assert_eq!(rep["pass"], true);
    assert!(rep["min_eig"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn verify_rejects_a_bad_certificate() {
    // gd with unit step but weights that overclaim the rate
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    let w = dir.path().join("w.json");
    hdual(&["gen", "gd", "--n", "4", "--h", "1.0", "--out", h.to_str().unwrap()]);
    std::fs::write(&w, "[100.0, 200.0, 300.0, 400.0, 500.0]").unwrap();
    let o = hdual(&[
        "verify",
        "--h-file",
        h.to_str().unwrap(),
        "--weights",
        w.to_str().unwrap(),
        "--kind",
        "c1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    // stepsize out of range
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = hdual(&["gen", "gd", "--n", "4", "--h", "1.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // infeasible family parameters name the failing index
    let o = hdual(&[
        "gen",
        "sfg-family",
        "--n",
        "8",
        "--alpha",
        "1.0",
        "--t",
        "sfg",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("index"), "stderr was: {msg}");

    // missing required selection
    let o = hdual(&["verify", "--kind", "c1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_against_fixture_checks_composite_bound() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx.json");
    std::fs::write(
        &fx,
        r#"{"A": [[0.6, 0.1, 0.0], [0.0, 0.5, 0.2], [0.1, 0.0, 0.4]],
            "b": [1.0, -0.5, 0.25],
            "reg": {"type": "l1", "lambda": 0.05},
            "Fstar": null}"#,
    )
    .unwrap();
    let o = hdual(&[
        "run", "--method", "sfg", "--n", "30", "--seed", "2", "--fixture",
        fx.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["pass"], true);
    assert!(rep["measured"].as_f64().unwrap() <= rep["bound_value"].as_f64().unwrap());
}

#[test]
fn trajectory_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    hdual(&[
        "run", "--method", "ogmg", "--n", "6", "--seed", "0", "--d", "3", "--out",
        p.to_str().unwrap(), "--coords",
    ]);
    let text = read(&p);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iter,f,grad_norm,x0,x1,x2");
    assert_eq!(lines.count(), 7);
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"method": "gogm", "n": 15, "t": "quadratic", "seed": 4, "d": 6}"#)
        .unwrap();
    let from_cfg = hdual(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    let direct = hdual(&[
        "run", "--method", "gogm", "--n", "15", "--t", "quadratic", "--seed", "4", "--d", "6",
    ]);
    assert_eq!(from_cfg.stdout, direct.stdout);
}

#[test]
fn sweep_runs_and_reports() {
    let o = hdual(&["sfg-sweep", "--n", "20", "--instances", "2", "--d", "10"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("alpha = 3.8"));
    assert!(text.contains("worst observed c"));
}
