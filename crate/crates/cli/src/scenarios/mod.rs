//! Scenario drivers.
//!
//! Each driver turns a validated config into summary statistics, verdicts
//! against the pinned thresholds, and a tabular view of per-case data.
//! Drivers draw randomness only through streams derived from the config
//! seed, so report bodies are pure functions of the config.

use std::time::Instant;

use crate::config::{ConfigError, ExperimentConfig, Scenario};
use crate::report::{ExperimentReport, Summary, Table, Verdict};

mod chsh;
mod einstein;
mod entangle;
mod hv_oracle;
mod noclone;
mod spread;
mod wigner;

/// Validate and execute one experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, Table), ConfigError> {
    config.validate()?;
    let started = Instant::now();
    let (summary, verdicts, table) = dispatch(config);
    let mut report = ExperimentReport::new(config.clone(), summary, verdicts);
    report.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok((report, table))
}

fn dispatch(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    match config.scenario {
        Scenario::Spread => spread::run(config),
        Scenario::Wigner => wigner::run(config),
        Scenario::Einstein => einstein::run(config),
        Scenario::Entangle => entangle::run(config),
        Scenario::Chsh => chsh::run(config),
        Scenario::Noclone => noclone::run(config),
        Scenario::HvOracle => hv_oracle::run(config),
    }
}

/// Derive an independent sub-seed for a named purpose within one
/// experiment, so different ensembles never share trial streams.
/// SplitMix64 finalizer over (master, tag).
pub(crate) fn sub_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}
