//! End-to-end behavior of the `fiqsim` binary and the run pipeline.

use std::process::Command;

use fiqsim_cli::config::{ExperimentConfig, Scenario};
use fiqsim_cli::scenarios::run_experiment;

fn fiqsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiqsim"))
}

fn fast_config(scenario: Scenario) -> ExperimentConfig {
    let mut config = ExperimentConfig::with_defaults(scenario);
    config.trials = 2_000;
    config.params.oracle_samples = 20_000;
    config.params.nonsignaling_trials = 10_000;
    config.params.mixtures = 4;
    config.params.permutations = 50;
    config.params.pairs = 50;
    config.params.sweep_cases = 5;
    config
}

#[test]
fn run_with_config_file_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("spread.json");
    let report_path = dir.path().join("report.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{"scenario": "spread", "seed": 7, "output_path": {:?}}}"#,
            report_path.to_str().unwrap()
        ),
    )
    .unwrap();

    let output = fiqsim()
        .args(["run", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");

    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(written["schema_version"], "1");
    assert_eq!(written["scenario"], "spread");
    assert_eq!(written["pass"], true);

    let echoed: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(echoed["schema_version"], "1");
}

#[test]
fn invalid_config_exits_two_listing_all_violations() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(
        &config_path,
        r#"{"scenario": "entangle", "params": {"delta_a": -1.0, "delta_l": 2.0, "oracle_samples": 3}}"#,
    )
    .unwrap();

    let output = fiqsim()
        .args(["run", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("delta_a"), "{stderr}");
    assert!(stderr.contains("delta_l"), "{stderr}");
    assert!(stderr.contains("oracle_samples"), "{stderr}");
}

#[test]
fn unknown_scenario_exits_two() {
    let output = fiqsim()
        .args(["run", "--scenario", "quantum"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_config_and_scenario_exits_two() {
    let output = fiqsim().arg("run").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn overrides_take_effect() {
    let output = fiqsim()
        .args([
            "run",
            "--scenario",
            "wigner",
            "--seed",
            "99",
            "--trials",
            "500",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["config"]["seed"], 99);
    assert_eq!(report["config"]["trials"], 500);
}

#[test]
fn csv_output_writes_time_series() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("spread.json");
    let csv_path = dir.path().join("widths.csv");
    std::fs::write(
        &config_path,
        format!(
            r#"{{"scenario": "spread", "output_format": "csv", "output_path": {:?}}}"#,
            csv_path.to_str().unwrap()
        ),
    )
    .unwrap();

    let output = fiqsim()
        .args(["run", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "time,width_law,width_transport");
    assert_eq!(lines.count(), 6);
}

#[test]
fn spread_time_series_matches_linear_law() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("spread.json");
    std::fs::write(
        &config_path,
        r#"{"scenario": "spread", "params": {"velocity_spread": 0.01, "segment_length": 1.0, "sample_times": [0.0, 25.0, 50.0, 100.0, 200.0]}}"#,
    )
    .unwrap();
    let output = fiqsim()
        .args(["run", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let widths: Vec<f64> = report["summary"]["widths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| pair[1].as_f64().unwrap())
        .collect();
    assert_eq!(widths, vec![0.0, 0.25, 0.5, 1.0, 1.0]);
    assert_eq!(report["summary"]["fitted_slope"].as_f64().unwrap(), 0.01);
}

#[test]
fn report_bodies_reproducible_across_runs() {
    for scenario in [
        Scenario::Spread,
        Scenario::Wigner,
        Scenario::Einstein,
        Scenario::Entangle,
        Scenario::Chsh,
        Scenario::Noclone,
        Scenario::HvOracle,
    ] {
        let config = fast_config(scenario);
        let (first, _) = run_experiment(&config).unwrap();
        let (second, _) = run_experiment(&config).unwrap();
        assert_eq!(
            first.body_json(),
            second.body_json(),
            "body differs for {scenario}"
        );
    }
}

#[test]
fn seed_changes_report_body() {
    let mut config = fast_config(Scenario::Wigner);
    let (first, _) = run_experiment(&config).unwrap();
    config.seed = 1;
    let (second, _) = run_experiment(&config).unwrap();
    assert_ne!(first.body_json(), second.body_json());
}

#[test]
fn binary_reproducibility_excluding_wall_clock() {
    let run = || {
        let output = fiqsim()
            .args(["run", "--scenario", "einstein", "--trials", "2000"])
            .output()
            .unwrap();
        assert!(output.status.success());
        let mut report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
        report.as_object_mut().unwrap().remove("wall_clock_seconds");
        serde_json::to_string(&report).unwrap()
    };
    assert_eq!(run(), run());
}
