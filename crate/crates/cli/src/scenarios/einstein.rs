//! Single-system nonlocality: branch collapse at a distance.

use fiqsim_core::correlations::{collapse_branch, BranchedPosition};
use fiqsim_core::dynamics::Interval;
use fiqsim_core::ensemble::run_trials;
use fiqsim_core::propensity::Propensity;
use fiqsim_core::tolerances::FREQUENCY_SIGMA;

use crate::config::ExperimentConfig;
use crate::report::{Summary, Table, Verdict};
use crate::scenarios::fmt;

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let p_left: Propensity = p.p_left.parse().expect("validated propensity");
    // Branch regions separated arbitrarily far; the separation never
    // enters the collapse.
    let state = BranchedPosition::new(
        Interval::new(0.0, 0.1),
        Interval::new(p.branch_separation, p.branch_separation + 0.1),
        p_left,
    )
    .expect("validated disjoint branches");
    let trials = config.trials;

    let outcomes = run_trials(config.seed, trials, |_, rng| {
        let collapsed = collapse_branch(&state, rng);
        let clean =
            collapsed.p_left.is_determined() && collapsed.p_right == collapsed.p_left.complement();
        (collapsed.p_left.is_one(), clean)
    });

    let lefts = outcomes.iter().filter(|(left, _)| *left).count() as u64;
    let collapsed_cleanly = outcomes.iter().filter(|(_, clean)| *clean).count() as u64;

    let expected_left = p_left.as_f64();
    let sigma = (trials as f64 * expected_left * (1.0 - expected_left)).sqrt();
    let z = if sigma > 0.0 {
        (lefts as f64 - trials as f64 * expected_left).abs() / sigma
    } else if lefts as f64 == trials as f64 * expected_left {
        0.0
    } else {
        f64::INFINITY
    };

    let mut table = Table::new(&["side", "count", "expected"]);
    table.push(vec![
        "left".into(),
        lefts.to_string(),
        fmt(trials as f64 * expected_left),
    ]);
    table.push(vec![
        "right".into(),
        (trials - lefts).to_string(),
        fmt(trials as f64 * (1.0 - expected_left)),
    ]);

    let verdicts = vec![
        Verdict::checked("einstein_branch_frequency_z", z, FREQUENCY_SIGMA).with_detail(format!(
            "left {lefts} of {trials}, propensity {expected_left}"
        )),
        Verdict::boolean(
            "einstein_collapse_is_definite",
            collapsed_cleanly == trials,
            format!("{collapsed_cleanly} of {trials} runs collapsed to propensities {{1,0}}"),
        ),
    ];

    let summary = Summary::Einstein {
        trials,
        left_frequency: lefts as f64 / trials as f64,
        expected_left,
        collapsed_cleanly,
    };
    (summary, verdicts, table)
}
