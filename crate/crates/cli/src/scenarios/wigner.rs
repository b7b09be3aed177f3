//! Boxed observer: inside-vs-outside state assignments.
//!
//! Over an ensemble of isolated boxes, the friend's measured outcomes
//! must reproduce the branch weights an outside observer assigns, while
//! the outside description stays identical to the pre-interaction state
//! in every single run.

use fiqsim_core::actualization::{enumerate_branches, wigner_friend_run};
use fiqsim_core::ensemble::run_trials;
use fiqsim_core::fiq::FiqState;
use fiqsim_core::tolerances::FREQUENCY_SIGMA;

use crate::config::ExperimentConfig;
use crate::report::{BranchStat, Summary, Table, Verdict};
use crate::scenarios::fmt;

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let state: FiqState = p.state.parse().expect("validated state string");
    let depth = p.friend_depth;
    let trials = config.trials;

    let branch_set = enumerate_branches(&state, depth).expect("validated depth");
    let patterns: Vec<Vec<u8>> = branch_set
        .branches()
        .iter()
        .map(|(s, _)| s.prefix()[..depth.min(s.prefix().len())].to_vec())
        .collect();

    let outcomes = run_trials(config.seed, trials, |_, rng| {
        let scenario = wigner_friend_run(&state, depth, rng).expect("validated depth");
        let identical = scenario.outside_state.identical(&state);
        let inside = scenario.inside_state.prefix()
            [..depth.min(scenario.inside_state.prefix().len())]
            .to_vec();
        (identical, inside)
    });

    let mut identical_count = 0u64;
    let mut histogram = vec![0u64; patterns.len()];
    for (identical, inside) in outcomes {
        identical_count += u64::from(identical);
        if let Some(idx) = patterns.iter().position(|p| p == &inside) {
            histogram[idx] += 1;
        }
    }
    let matched: u64 = histogram.iter().sum();

    let weights = branch_set.weights_f64();
    let mut branch_stats = Vec::with_capacity(patterns.len());
    let mut worst_z = 0.0f64;
    let mut table = Table::new(&["branch", "weight", "expected", "observed", "z"]);
    for ((pattern, &w), &observed) in patterns.iter().zip(&weights).zip(&histogram) {
        let expected = trials as f64 * w;
        let sigma = (trials as f64 * w * (1.0 - w)).sqrt();
        let z = if sigma > 0.0 {
            (observed as f64 - expected).abs() / sigma
        } else if (observed as f64 - expected).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z);
        let label: String = pattern.iter().map(|b| char::from(b'0' + b)).collect();
        table.push(vec![
            label.clone(),
            fmt(w),
            fmt(expected),
            observed.to_string(),
            fmt(z),
        ]);
        branch_stats.push(BranchStat {
            pattern: label,
            weight: w,
            observed,
            expected,
            z,
        });
    }

    let outside_identical_fraction = identical_count as f64 / trials as f64;
    let verdicts = vec![
        Verdict::boolean(
            "wigner_outside_state_identical",
            identical_count == trials,
            format!("{identical_count} of {trials} runs"),
        ),
        Verdict::checked("wigner_branch_frequency_z", worst_z, FREQUENCY_SIGMA),
        Verdict::boolean(
            "wigner_inside_outcomes_are_branches",
            matched == trials,
            format!("{matched} of {trials} outcomes matched an enumerated branch"),
        ),
    ];

    let summary = Summary::Wigner {
        trials,
        outside_identical_fraction,
        branch_stats,
        worst_z,
    };
    (summary, verdicts, table)
}
