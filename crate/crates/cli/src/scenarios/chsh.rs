//! The classical CHSH bound.

use fiqsim_core::correlations::{
    chsh_max_deterministic, chsh_value, ChshStrategy, LocalDeterministic, ResponseTable,
};
use fiqsim_core::ensemble::run_trials;
use fiqsim_core::tolerances::{CHSH_CLASSICAL_BOUND, CHSH_SE_FACTOR};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::report::{ChshRow, Summary, Table, Verdict};
use crate::scenarios::{fmt, sub_seed};

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let mut table = Table::new(&["strategy", "s", "standard_error", "within_bound"]);
    let mut rows = Vec::new();

    // Exhaustive exact maximum over the 16 deterministic local strategies.
    let deterministic_max = chsh_max_deterministic();
    for (i, s) in LocalDeterministic::all().iter().enumerate() {
        table.push(vec![
            format!("deterministic_{i:02}"),
            fmt(s.exact_chsh()),
            fmt(0.0),
            (s.exact_chsh().abs() <= CHSH_CLASSICAL_BOUND).to_string(),
        ]);
    }

    // Sampled convex mixtures of deterministic strategies (shared
    // classical randomness), one per ensemble member.
    let trials_per_estimate = config.trials;
    let strategies = LocalDeterministic::all();
    let estimates = run_trials(
        sub_seed(config.seed, 1),
        config.params.mixtures,
        |_, rng| {
            let raw: Vec<f64> = (0..strategies.len()).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let parts: Vec<(f64, LocalDeterministic)> = raw
                .iter()
                .zip(&strategies)
                .map(|(w, s)| (w / total, *s))
                .collect();
            chsh_value(&ChshStrategy::SharedRandom(parts), trials_per_estimate, rng)
                .expect("normalized mixture")
        },
    );

    let mut mixture_max_s = 0.0f64;
    let mut mixture_max_excess = f64::NEG_INFINITY;
    let mut all_within = true;
    for (i, est) in estimates.iter().enumerate() {
        let bound = CHSH_CLASSICAL_BOUND + CHSH_SE_FACTOR * est.standard_error;
        let excess = est.s.abs() - bound;
        mixture_max_s = mixture_max_s.max(est.s.abs());
        mixture_max_excess = mixture_max_excess.max(excess);
        all_within &= est.within_classical_bound();
        let label = format!("mixture_{i:02}");
        table.push(vec![
            label.clone(),
            fmt(est.s),
            fmt(est.standard_error),
            est.within_classical_bound().to_string(),
        ]);
        rows.push(ChshRow {
            label,
            s: est.s,
            standard_error: est.standard_error,
            within_bound: est.within_classical_bound(),
        });
    }

    // Strategies reading a shared finite-information state: each trial
    // completes the state once, each party maps its own digits to ±1.
    let shared_estimates = run_trials(sub_seed(config.seed, 3), 8, |i, rng| {
        let state = random_shared_state(rng);
        let est = chsh_value(
            &ChshStrategy::SharedFiq(state.clone()),
            trials_per_estimate,
            rng,
        )
        .expect("valid shared state");
        (i, state, est)
    });
    let mut shared_within = true;
    for (i, state, est) in &shared_estimates {
        shared_within &= est.within_classical_bound();
        let label = format!("shared_fiq_{i:02}");
        table.push(vec![
            label.clone(),
            fmt(est.s),
            fmt(est.standard_error),
            est.within_classical_bound().to_string(),
        ]);
        rows.push(ChshRow {
            label: format!("{label} ({state})"),
            s: est.s,
            standard_error: est.standard_error,
            within_bound: est.within_classical_bound(),
        });
    }

    // Nonlocal sanity bound: the harness must see the PR box break the
    // classical bound and reach 4.
    let pr = ResponseTable::pr_box();
    let pr_exact = pr.exact_chsh();
    let mut pr_rng = fiqsim_core::rng::seed_stream(sub_seed(config.seed, 2), 0);
    let pr_est = chsh_value(&ChshStrategy::Table(pr), trials_per_estimate, &mut pr_rng)
        .expect("pr box rows are distributions");
    table.push(vec![
        "pr_box".into(),
        fmt(pr_est.s),
        fmt(pr_est.standard_error),
        pr_est.within_classical_bound().to_string(),
    ]);

    let verdicts = vec![
        Verdict::boolean(
            "chsh_deterministic_max_is_two",
            deterministic_max == CHSH_CLASSICAL_BOUND,
            format!("exhaustive max over 16 strategies = {deterministic_max}"),
        ),
        Verdict::boolean(
            "chsh_mixtures_within_bound",
            all_within,
            format!(
                "max |S| = {mixture_max_s}, max excess over 2 + {CHSH_SE_FACTOR}·SE = {mixture_max_excess}"
            ),
        ),
        Verdict::boolean(
            "chsh_shared_state_within_bound",
            shared_within,
            format!("{} shared-state strategies", shared_estimates.len()),
        ),
        Verdict::boolean(
            "chsh_pr_box_sanity",
            pr_exact == 4.0 && !pr_est.within_classical_bound(),
            format!("PR box exact S = {pr_exact}, sampled {}", pr_est.s),
        ),
    ];

    let summary = Summary::Chsh {
        deterministic_max,
        mixture_max_s,
        mixture_max_excess,
        pr_box_s: pr_est.s,
        strategies: rows,
    };
    (summary, verdicts, table)
}

/// Shared λ source: a short random biased state (at least four stored
/// digits never hurts, the fair tail covers the rest).
fn random_shared_state<R: Rng + ?Sized>(rng: &mut R) -> fiqsim_core::FiqState {
    use fiqsim_core::Propensity;
    let zone_len = rng.gen_range(0..=4);
    let zone: Vec<Propensity> = (0..zone_len)
        .map(|_| {
            let den = rng.gen_range(2u64..=20);
            let num = rng.gen_range(1..den);
            Propensity::new(num, den).expect("strict")
        })
        .collect();
    fiqsim_core::FiqState::from_biased(&zone)
}
