use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = persuade(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")),
        out.status.code().unwrap(),
    )
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("persuade-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_scenario(tag: &str, body: &str) -> PathBuf {
    let path = scratch(tag).join("scenario.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn delegate_examples() {
    let a = scenario("regression_a.toml");
    let (r, code) = json(&["delegate", a.to_str().unwrap(), "--interim", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(r["decision"], "delegate");
    assert!(close(f(&r["stage_payoff"]), 0.8));
    assert_eq!(r["necessary_condition_consistent"], true);

    let (r, _) = json(&["delegate", a.to_str().unwrap(), "--interim", "0.9"]);
    assert_eq!(r["decision"], "direct");
    assert!(close(f(&r["stage_payoff"]), 0.9));
}

#[test]
fn malformed_files_exit_2_with_field() {
    let text = std::fs::read_to_string(scenario("regression_a.toml")).unwrap();
    let bad = write_scenario("bad-signal", &text.replace("q1 = 0.8", "q1 = 0.1"));
    let out = persuade(&["design", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agent_signal"));

    let broken = write_scenario("bad-toml", &text.replace("r11 = 1.0", "r11 = oops"));
    let out = persuade(&["delegate", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");

    let out = persuade(&["design", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_examples() {
    let (r, code) = json(&["design", scenario("regression_a.toml").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["regime"], "one-sided-high");
    assert!(close(f(&r["expected_payoff"]), 0.8));
    assert!(close(f(&r["rho"]), 3.0 / 7.0));
    assert_eq!(r["convexifiable"], false);

    let (r, _) = json(&["design", scenario("regression_b.toml").to_str().unwrap()]);
    assert_eq!(r["regime"], "maximal");
    assert!(close(f(&r["expected_payoff"]), 0.9));

    let text = std::fs::read_to_string(scenario("regression_a.toml")).unwrap();
    let at_rho = write_scenario(
        "at-rho",
        &text.replace("prior = 0.5", &format!("prior = {}", 3.0f64 / 7.0)),
    );
    let (r, _) = json(&["design", at_rho.to_str().unwrap()]);
    assert_eq!(r["regime"], "uninformative");
}

#[test]
fn regimes_rank_straddling_constraint() {
    let (r, code) = json(&["regimes", scenario("regression_a.toml").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["optimal_dominates"], true);
    let rows = r["regimes"].as_array().unwrap();
    let rank = |name: &str| {
        rows.iter().find(|x| x["regime"] == name).unwrap()["rank"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(rank("optimal-joint"), 1);
    assert!(rank("mandated-maximal-signal") > 1);
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_shows_dip_in_delegation_payoff() {
    let path = scenario("reference_players.toml");
    let args = [
        "sweep",
        path.to_str().unwrap(),
        "--vary",
        "q",
        "--from",
        "0.55",
        "--to",
        "0.95",
        "--steps",
        "9",
        "--interim",
        "0.9",
        "--regimes",
        "delegation-payoff,direct-payoff",
    ];
    let out = persuade(&args);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 18);
    let payoff = |q: f64, metric: &str| {
        rows.iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - q).abs() < 1e-9 && r[1] == metric)
            .map(|r| r[2].parse::<f64>().unwrap())
            .unwrap()
    };
    assert!(close(payoff(0.55, "delegation-payoff"), 0.9));
    assert!(close(payoff(0.8, "delegation-payoff"), 0.8));
    assert!(payoff(0.8, "delegation-payoff") < payoff(0.8, "direct-payoff"));
    assert!(payoff(0.95, "delegation-payoff") > payoff(0.8, "delegation-payoff"));

    // 17 significant digits, deterministic.
    assert_eq!(rows[0][2], "9.0000000000000002e-1");
    assert_eq!(persuade(&args).stdout, out.stdout);
}

#[test]
fn sweep_agent_cutoff_weakly_lowers_stage_payoff() {
    let path = scenario("regression_a.toml");
    let out = persuade(&[
        "sweep",
        path.to_str().unwrap(),
        "--vary",
        "agent_cutoff",
        "--from",
        "0.75",
        "--to",
        "0.95",
        "--steps",
        "21",
        "--interim",
        "0.6",
        "--regimes",
        "delegation-stage-payoff",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = csv_rows(&out)
        .iter()
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert!(
        values.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "{values:?}"
    );
    assert!(values[0] > *values.last().unwrap());
}

#[test]
fn sweep_single_step_and_bad_field() {
    let path = scenario("regression_a.toml");
    let p = path.to_str().unwrap();
    let out = persuade(&[
        "sweep",
        p,
        "--vary",
        "q",
        "--from",
        "0.7",
        "--to",
        "0.9",
        "--steps",
        "1",
        "--regimes",
        "optimal-joint",
    ]);
    assert_eq!(csv_rows(&out).len(), 1);

    let out = persuade(&["sweep", p, "--vary", "bogus", "--from", "0", "--to", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = persuade(&[
        "sweep",
        p,
        "--vary",
        "q",
        "--from",
        "0.7",
        "--to",
        "0.9",
        "--regimes",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_regimes_default_to_all_five() {
    let path = scenario("regression_a.toml");
    let out = persuade(&[
        "sweep",
        path.to_str().unwrap(),
        "--vary",
        "constraint_high",
        "--from",
        "0.55",
        "--to",
        "0.9",
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 15);
    for chunk in rows.chunks(5) {
        let optimal: f64 = chunk[0][2].parse().unwrap();
        assert!(chunk
            .iter()
            .all(|r| r[2].parse::<f64>().unwrap() <= optimal + 1e-12));
    }
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn figures_aligned_envelopes_coincide() {
    let dir = scratch("fig-aligned");
    let out = persuade(&[
        "figures",
        scenario("aligned.toml").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(&dir.join("envelopes.csv"));
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r[3] == r[4]));
}

#[test]
fn figures_asymmetric_slope() {
    let dir = scratch("fig-asym");
    persuade(&[
        "figures",
        scenario("asymmetric_players.toml").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    let ann: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("annotations.json")).unwrap())
            .unwrap();
    assert!(close(f(&ann["intermediate_line"]["slope"]), -0.2));
}

#[test]
fn figures_out_dir_from_env_and_unwritable() {
    let dir = scratch("fig-env").join("nested");
    let out = Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args([
            "figures",
            scenario("reference_players.toml").to_str().unwrap(),
        ])
        .env("PERSUADE_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("delegation_stage.csv").exists());

    let file = scratch("fig-file").join("not-a-dir");
    std::fs::write(&file, "x").unwrap();
    let out = persuade(&[
        "figures",
        scenario("reference_players.toml").to_str().unwrap(),
        "--out",
        file.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_examples() {
    let players = scenario("reference_players.toml");
    let (r, code) = json(&[
        "witness",
        players.to_str().unwrap(),
        "--kind",
        "maximal-signal-loss",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["found"], true);
    assert!(f(&r["payoff_gap"]) >= 0.0375 - 1e-12);

    let (r, code) = json(&[
        "witness",
        players.to_str().unwrap(),
        "--kind",
        "delegation-loss",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(f(&r["payoff_gap"]) >= 0.1 - 1e-12);

    let (r, code) = json(&[
        "witness",
        scenario("aligned.toml").to_str().unwrap(),
        "--kind",
        "delegation-loss",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["found"], false);
    assert_eq!(r["reason"], "aligned-preferences");
}

#[test]
fn witness_not_found_exits_1() {
    // Agent signal too weak to ever make delegation strictly valuable.
    let text = std::fs::read_to_string(scenario("reference_players.toml")).unwrap();
    let weak = write_scenario(
        "weak",
        &text
            .replace("q0 = 0.8", "q0 = 0.55")
            .replace("q1 = 0.8", "q1 = 0.55"),
    );
    let (r, code) = json(&[
        "witness",
        weak.to_str().unwrap(),
        "--kind",
        "maximal-signal-loss",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["reason"], "not-found");
}

#[test]
fn oracle_check_passes_on_regressions() {
    for name in ["regression_a.toml", "regression_b.toml"] {
        let (r, code) = json(&[
            "oracle-check",
            scenario(name).to_str().unwrap(),
            "--mc-samples",
            "200000",
            "--seed",
            "5",
        ]);
        assert_eq!(code, 0, "{r}");
        let grid = r["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == "grid-vs-closed-form")
            .unwrap();
        assert!(f(&grid["delta"]) <= 1e-9);
    }
    let out = persuade(&[
        "oracle-check",
        scenario("regression_a.toml").to_str().unwrap(),
        "--mc-samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1000"));
}
