//! Hidden-variable completion equivalence sweep.

use fiqsim_core::ensemble::run_trials;
use fiqsim_core::fiq::FiqState;
use fiqsim_core::hidden_variables::equivalence_oracle;
use fiqsim_core::propensity::Propensity;
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::report::{OracleCase, Summary, Table, Verdict};
use crate::scenarios::{fmt, sub_seed};

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let trials = config.trials;

    let cases = run_trials(sub_seed(config.seed, 1), p.sweep_cases, |_, rng| {
        let state = random_state(rng);
        let steps = rng.gen_range(0..=p.max_shift_steps);
        let observe = rng.gen_range(1..=p.observe_digits);
        let report = equivalence_oracle(&state, steps, observe, p.completion_depth, trials, rng)
            .expect("validated bounds");
        OracleCase {
            state: state.to_string(),
            steps,
            observe,
            tvd: report.tvd,
            threshold: report.threshold,
            pass: report.pass,
        }
    });

    let mut table = Table::new(&["state", "steps", "observe", "tvd", "threshold", "pass"]);
    let mut worst_margin = f64::NEG_INFINITY;
    let mut all_pass = true;
    for case in &cases {
        worst_margin = worst_margin.max(case.tvd - case.threshold);
        all_pass &= case.pass;
        table.push(vec![
            case.state.clone(),
            case.steps.to_string(),
            case.observe.to_string(),
            fmt(case.tvd),
            fmt(case.threshold),
            case.pass.to_string(),
        ]);
    }

    let verdicts = vec![Verdict::boolean(
        "hv_completion_equivalent",
        all_pass,
        format!("{} cases, worst tvd margin {worst_margin}", cases.len()),
    )];

    let summary = Summary::HvOracle {
        cases,
        worst_tvd_margin: worst_margin,
    };
    (summary, verdicts, table)
}

/// Random state: short determined prefix, short strictly biased zone.
fn random_state<R: Rng + ?Sized>(rng: &mut R) -> FiqState {
    let prefix_len = rng.gen_range(0..=3);
    let prefix: Vec<u8> = (0..prefix_len).map(|_| rng.gen_range(0..=1)).collect();
    let zone_len = rng.gen_range(0..=3);
    let zone: Vec<Propensity> = (0..zone_len)
        .map(|_| {
            let den = rng.gen_range(2u64..=50);
            let num = rng.gen_range(1..den);
            Propensity::new(num, den).expect("strict propensity")
        })
        .collect();
    FiqState::new(&prefix, &zone).expect("valid bits")
}
