use std::process::{Command, Output};

fn starcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starcov"))
        .args(args)
        .env_remove("STARCOV_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_prints_solution() {
    let out = starcov(&[
        "solve", "--scheme", "star-noma", "--gamma-t", "5", "--gamma-r", "5", "--mu-t", "0.6",
        "--seed", "7",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    for key in ["d0", "d_t", "d_r", "p_t", "p_r", "beta_t"] {
        assert!(v[key].as_f64().unwrap() > 0.0, "{key}");
    }
    assert!(v["order"].is_string());
    let d0 = v["d0"].as_f64().unwrap();
    let dt = v["d_t"].as_f64().unwrap();
    assert!((dt - 0.6 * d0).abs() < 1e-6 * d0);
}

#[test]
fn infeasible_solve_is_not_an_error() {
    let out = starcov(&["solve", "--scheme", "cr-oma", "--pmax-dbm", "-80", "--gamma-t", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["feasible"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(starcov(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(starcov(&["solve", "--scheme", "tdma"]).status.code(), Some(2));
    assert_eq!(starcov(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(starcov(&[]).status.code(), Some(2));
}

#[test]
fn bad_parameter_values_fail() {
    let out = starcov(&["solve", "--mu-t", "0.7", "--mu-r", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn run_preset_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let out = starcov(&["run", "fig4", "--trials", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "swept_name,swept_value,scheme,trials,mean_d0,std_d0,mean_dt,mean_dr,infeasible_count"
    );
    assert_eq!(lines.count(), 20);
}

#[test]
fn run_is_reproducible_and_honours_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_starcov"))
            .args(["run", "fig2", "--trials", "2", "--seed", "5"])
            .env("STARCOV_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(dir.path().join("fig2.csv")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn run_json_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    let csv = dir.path().join("sweep.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"name": "pmax", "swept": {{"variable": "gamma_t", "values": [2, 4]}},
                "trials": 2, "schemes": ["STAR-OMA"], "output_path": {:?}}}"#,
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = starcov(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("gamma_t,2,STAR-OMA,2,"));
}

#[test]
fn unknown_scenario_fails() {
    let out = starcov(&["run", "no-such-preset"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_agrees() {
    let out = starcov(&["oracle", "--scheme", "star-oma", "--seed", "2", "--grid-n", "64"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["within_slack"], true);
}

#[test]
fn selftest_passes() {
    let out = starcov(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
