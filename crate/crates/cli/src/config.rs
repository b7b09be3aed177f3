//! Experiment configuration: JSON schema, defaults, and validation.
//!
//! Every scenario parameter is validated against the target module's
//! preconditions before any trial runs; an invalid config reports every
//! violated precondition at once.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use fiqsim_core::fiq::FiqState;
use fiqsim_core::tolerances::{MAX_COMPLETION_DEPTH, MAX_ENUM_DEPTH, MAX_FIQ_GRID_DEPTH};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n{}", violations.join("\n"))]
    Invalid { violations: Vec<String> },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
}

/// The seven experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spread,
    Wigner,
    Einstein,
    Entangle,
    Chsh,
    Noclone,
    HvOracle,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Spread => "spread",
            Scenario::Wigner => "wigner",
            Scenario::Einstein => "einstein",
            Scenario::Entangle => "entangle",
            Scenario::Chsh => "chsh",
            Scenario::Noclone => "noclone",
            Scenario::HvOracle => "hv-oracle",
        };
        f.write_str(name)
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spread" => Ok(Scenario::Spread),
            "wigner" => Ok(Scenario::Wigner),
            "einstein" => Ok(Scenario::Einstein),
            "entangle" => Ok(Scenario::Entangle),
            "chsh" => Ok(Scenario::Chsh),
            "noclone" => Ok(Scenario::Noclone),
            "hv-oracle" => Ok(Scenario::HvOracle),
            other => Err(ConfigError::UnknownScenario(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// A single experiment: scenario, seed, trial count, output, and
/// scenario-specific parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub params: ScenarioParams,
}

fn default_trials() -> u64 {
    30_000
}

impl ExperimentConfig {
    /// A config with scenario defaults, no file needed.
    pub fn with_defaults(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            seed: 0,
            trials: default_trials(),
            output_format: OutputFormat::default(),
            output_path: None,
            params: ScenarioParams::default(),
        }
    }

    /// Validate everything the target scenario will rely on; collects all
    /// violations rather than stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        if self.trials < 1 {
            violations.push("trials must be >= 1".to_owned());
        }
        let p = &self.params;
        let positive = |name: &str, v: f64, out: &mut Vec<String>| {
            if !(v > 0.0) {
                out.push(format!("{name} must be positive (got {v})"));
            }
        };
        match self.scenario {
            Scenario::Spread => {
                positive("velocity_spread", p.velocity_spread, &mut violations);
                positive("segment_length", p.segment_length, &mut violations);
                if p.sample_times.iter().any(|&t| t < 0.0) {
                    violations.push("sample_times must be non-negative".to_owned());
                }
                if p.sample_times.len() < 3 {
                    violations.push("sample_times needs at least 3 points for a fit".to_owned());
                }
            }
            Scenario::Wigner => {
                if p.state.parse::<FiqState>().is_err() {
                    violations.push(format!("state {:?} is not a valid state string", p.state));
                }
                if p.friend_depth > MAX_ENUM_DEPTH {
                    violations.push(format!(
                        "friend_depth {} exceeds enumeration maximum {MAX_ENUM_DEPTH}",
                        p.friend_depth
                    ));
                }
            }
            Scenario::Einstein => {
                if p.p_left.parse::<fiqsim_core::Propensity>().is_err() {
                    violations.push(format!("p_left {:?} is not a propensity", p.p_left));
                }
                positive("branch_separation", p.branch_separation, &mut violations);
            }
            Scenario::Entangle => {
                positive("delta_a", p.delta_a, &mut violations);
                if !(p.delta_l >= 0.0) || p.delta_l >= p.delta_a {
                    violations.push(format!(
                        "delta_l must satisfy 0 <= delta_l < delta_a (got {} vs {})",
                        p.delta_l, p.delta_a
                    ));
                }
                if p.actualization_steps > 4 {
                    violations.push(format!(
                        "actualization_steps {} exceeds the modeled maximum 4",
                        p.actualization_steps
                    ));
                }
                if p.oracle_samples < 10_000 {
                    violations.push("oracle_samples must be at least 10^4".to_owned());
                }
                if p.nonsignaling_trials < 10_000 {
                    violations.push("nonsignaling_trials must be at least 10^4".to_owned());
                }
            }
            Scenario::Chsh => {
                if p.mixtures < 1 {
                    violations.push("mixtures must be >= 1".to_owned());
                }
            }
            Scenario::Noclone => {
                if p.grid_cells < 2 {
                    violations.push("grid_cells must be >= 2".to_owned());
                }
                if p.permutations < 1 {
                    violations.push("permutations must be >= 1".to_owned());
                }
                if p.pairs < 1 {
                    violations.push("pairs must be >= 1".to_owned());
                }
                if p.fiq_depth == 0 || p.fiq_depth > MAX_FIQ_GRID_DEPTH {
                    violations.push(format!(
                        "fiq_depth {} outside 1..={MAX_FIQ_GRID_DEPTH}",
                        p.fiq_depth
                    ));
                }
            }
            Scenario::HvOracle => {
                if p.sweep_cases < 1 {
                    violations.push("sweep_cases must be >= 1".to_owned());
                }
                if p.completion_depth > MAX_COMPLETION_DEPTH {
                    violations.push(format!(
                        "completion_depth {} exceeds maximum {MAX_COMPLETION_DEPTH}",
                        p.completion_depth
                    ));
                }
                if p.max_shift_steps + p.observe_digits > p.completion_depth {
                    violations.push(format!(
                        "max_shift_steps {} + observe_digits {} exceed completion_depth {}",
                        p.max_shift_steps, p.observe_digits, p.completion_depth
                    ));
                }
                if p.observe_digits == 0 || p.observe_digits > 4 {
                    violations.push("observe_digits must be in 1..=4".to_owned());
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { violations })
        }
    }
}

/// Scenario parameters, all with defaults so a config may state only what
/// it changes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    // spread
    pub velocity_spread: f64,
    pub segment_length: f64,
    pub sample_times: Vec<f64>,
    // wigner / hv-oracle state (canonical text form)
    pub state: String,
    pub friend_depth: usize,
    // einstein
    pub p_left: String,
    pub branch_separation: f64,
    // entangle
    pub delta_a: f64,
    pub delta_l: f64,
    pub actualization_steps: usize,
    pub oracle_samples: u64,
    pub nonsignaling_trials: u64,
    // chsh
    pub mixtures: u64,
    // noclone
    pub grid_cells: usize,
    pub permutations: u64,
    pub pairs: u64,
    pub fiq_depth: usize,
    // hv-oracle
    pub sweep_cases: u64,
    pub completion_depth: usize,
    pub max_shift_steps: usize,
    pub observe_digits: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            velocity_spread: 0.01,
            segment_length: 1.0,
            sample_times: vec![0.0, 25.0, 50.0, 75.0, 100.0, 200.0],
            state: "prefix=;biased=2/3;".to_owned(),
            friend_depth: 1,
            p_left: "1/2".to_owned(),
            branch_separation: 100.0,
            delta_a: 8.0,
            delta_l: 0.5,
            actualization_steps: 4,
            oracle_samples: 1_000_000,
            nonsignaling_trials: 100_000,
            mixtures: 20,
            grid_cells: 32,
            permutations: 1_000,
            pairs: 1_000,
            fiq_depth: 3,
            sweep_cases: 50,
            completion_depth: 16,
            max_shift_steps: 4,
            observe_digits: 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"scenario": "spread"}"#).unwrap();
        assert_eq!(cfg.scenario, Scenario::Spread);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.trials, 30_000);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn hv_oracle_name_uses_hyphen() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"scenario": "hv-oracle"}"#).unwrap();
        assert_eq!(cfg.scenario, Scenario::HvOracle);
        assert_eq!(cfg.scenario.to_string(), "hv-oracle");
    }

    #[test]
    fn validation_collects_every_violation() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{
                "scenario": "entangle",
                "params": {
                    "delta_a": -1.0,
                    "delta_l": 2.0,
                    "actualization_steps": 9,
                    "oracle_samples": 10,
                    "nonsignaling_trials": 10
                }
            }"#,
        )
        .unwrap();
        match cfg.validate() {
            Err(ConfigError::Invalid { violations }) => {
                assert_eq!(violations.len(), 5, "{violations:?}");
            }
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"scenario": "spread", "sedd": 4}"#);
        assert!(err.is_err());
    }

    #[test]
    fn bad_state_string_reported() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"scenario": "wigner", "params": {"state": "nonsense"}}"#)
                .unwrap();
        assert!(cfg.validate().is_err());
    }
}
