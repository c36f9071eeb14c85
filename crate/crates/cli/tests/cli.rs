//! End-to-end checks of the `cpshave` binary against the bundled instances.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpshave"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_game_type_and_capabilities() {
    let out = run(&["classify", data("instances/case1.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["game_type"], "quasiconcave");
    assert_eq!(v["agents"][0]["capability"], "capable");

    let out = run(&["classify", data("instances/six_agent.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["game_type"], "non_concave");
    assert_eq!(v["agents"][2]["capability"], "lower_non_capable");
    assert_eq!(v["agents"][3]["capability"], "upper_non_capable");
}

#[test]
fn missing_field_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"agents": []}"#).unwrap();
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cp_price"), "stderr: {stderr}");
}

#[test]
fn invalid_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"cp_price": 1.0, "agents": [
            {"id": "x", "demand_p1": 1.0, "demand_p2": 2.0, "penalty": 0.0},
            {"id": "y", "demand_p1": 1.0, "demand_p2": 2.0, "penalty": 0.1}
        ]}"#,
    )
    .unwrap();
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("penalty"));
}

#[test]
fn solve_closed_form_matches_known_equilibria() {
    let out = run(&["solve", data("instances/case1.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["method"], "closed_form");
    let shifts = v["shifts"].as_array().unwrap();
    assert!((shifts[0].as_f64().unwrap() - 3.5).abs() < 1e-9);
    assert!((shifts[1].as_f64().unwrap() + 1.5).abs() < 1e-9);
    assert_eq!(v["balanced"], true);

    let out = run(&["solve", data("instances/six_agent.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    let hybrid = &v["hybrid"];
    assert!((hybrid["aggregate_target"].as_f64().unwrap() - 6.75).abs() < 1e-9);
    assert_eq!(hybrid["determined"][0]["shift"], -2.0);
}

#[test]
fn solve_dynamics_agrees_with_closed_form_and_dumps_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("trajectory.csv");
    let out = run(&[
        "solve",
        data("instances/case1.json").to_str().unwrap(),
        "--method",
        "dynamics",
        "--trajectory",
        traj.to_str().unwrap(),
        "--every",
        "10",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["converged"], true);
    let shifts = v["shifts"].as_array().unwrap();
    assert!((shifts[0].as_f64().unwrap() - 3.5).abs() < 1e-5);
    assert!((shifts[1].as_f64().unwrap() + 1.5).abs() < 1e-5);

    let csv = std::fs::read_to_string(&traj).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "iter,period,x_x,x_y,S1,S2,V1,V2,payoff_gap");
    assert!(csv.lines().count() > 2);
}

#[test]
fn solve_verify_attaches_a_passing_report() {
    let out = run(&[
        "solve",
        data("instances/case2.json").to_str().unwrap(),
        "--verify",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["verification"]["passes"], true);
}

#[test]
fn evaluate_round_trips_cost_figures() {
    let instance = data("instances/case3.json");
    let out = run(&["solve", instance.to_str().unwrap()]);
    let solved = stdout_json(&out);

    let dir = tempfile::tempdir().unwrap();
    let shifts_path = dir.path().join("shifts.json");
    std::fs::write(&shifts_path, solved["shifts"].to_string()).unwrap();
    let out = run(&[
        "solve",
        instance.to_str().unwrap(),
        "--evaluate",
        shifts_path.to_str().unwrap(),
    ]);
    let evaluated = stdout_json(&out);
    assert_eq!(solved["total_cost"], evaluated["total_cost"]);
    assert_eq!(solved["per_agent_cost"], evaluated["per_agent_cost"]);
    assert_eq!(solved["s1"], evaluated["s1"]);
}

#[test]
fn benchmark_reports_reference_losses() {
    let out = run(&["benchmark", data("instances/case1.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert!((v["efficiency_loss"].as_f64().unwrap() - 1.125).abs() < 1e-9);
    assert!((v["peak_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = run(&["benchmark", data("instances/case3.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["efficiency_loss"].as_f64().unwrap(), 1.0);
    // The identity is defined only for balanced equilibria.
    assert!(v["identity_residual"].is_null());

    let out = run(&[
        "benchmark",
        data("instances/case2.json").to_str().unwrap(),
        "--dynamics",
    ]);
    let v = stdout_json(&out);
    assert!((v["efficiency_loss"].as_f64().unwrap() - 1.0941).abs() < 1e-3);
    assert_eq!(v["dynamics"]["converged"], true);
    assert!((v["dynamics"]["efficiency_loss"].as_f64().unwrap() - 1.0941).abs() < 1e-3);
}

#[test]
fn swapped_orientation_is_reported_in_input_labels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("swapped.json");
    // Case (1) with the period labels exchanged.
    std::fs::write(
        &path,
        r#"{"cp_price": 1.0, "agents": [
            {"id": "x", "demand_p1": 10.0, "demand_p2": 3.0, "penalty": 0.1},
            {"id": "y", "demand_p1": 3.0, "demand_p2": 6.0, "penalty": 0.2}
        ]}"#,
    )
    .unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["orientation"], "swapped");
    let shifts = v["shifts"].as_array().unwrap();
    assert!((shifts[0].as_f64().unwrap() + 3.5).abs() < 1e-9);
    assert!((shifts[1].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"n_min": 2, "n_max": 3, "samples_per_n": 5,
            "demand_range": [0.0, 15.0], "penalty_range": [0.0, 0.5], "seed": 13}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(stdout.lines().count(), 2, "one summary line per agent count");
    }
    let a = std::fs::read(out_a.join("sweep.csv")).unwrap();
    let b = std::fs::read(out_b.join("sweep.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("n,sample,game_type,efficiency_loss,peak_ratio\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 5);
}

#[test]
fn sweep_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"n_min": 2, "n_max": 2, "samples_per_n": 1,
            "demand_range": [0.0, 15.0], "penalty_range": [0.0, 0.5]}"#,
    )
    .unwrap();
    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn realworld_runs_on_a_small_record_set() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    let gen = run(&[
        "gen-records",
        "--seed",
        "3",
        "--participants",
        "10",
        "--out",
        records.to_str().unwrap(),
    ]);
    assert!(gen.status.success());

    let config = dir.path().join("rw.json");
    std::fs::write(
        &config,
        r#"{"cp_price": 66.76, "seed": 4, "samples": 2, "levels": [0.25, 0.5]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "realworld",
        "--records",
        records.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 2, "one line per level");

    let rows = std::fs::read_to_string(out_dir.join("realworld.csv")).unwrap();
    assert!(rows.starts_with("level,sample,participant_id,charge_before,charge_after,shift\n"));
    assert_eq!(rows.lines().count(), 1 + 2 * 2 * 10);
    let summary = std::fs::read_to_string(out_dir.join("realworld_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn gen_records_is_deterministic() {
    let a = run(&["gen-records", "--seed", "42", "--participants", "8"]);
    let b = run(&["gen-records", "--seed", "42", "--participants", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.starts_with("participant_id,cp1,cp2,cp3,cp4\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn csv_format_emits_per_agent_table() {
    let out = run(&[
        "solve",
        data("instances/case1.json").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "id,shift,cost");
    assert!(lines.next().unwrap().starts_with("x,3.5,"));
}
