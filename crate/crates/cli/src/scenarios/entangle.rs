//! Classical entanglement analogue: variance identity and nonsignaling.

use fiqsim_core::correlations::{
    actualize_local, make_pair, nonsignaling_test, nonsignaling_test_with_shift, sample_positions,
    CorrelationError, DistributionFamily, Side,
};
use fiqsim_core::ensemble::run_trials;
use fiqsim_core::rng::seed_stream;
use fiqsim_core::tolerances::{EXACT_IDENTITY_TOL, VARIANCE_ORACLE_REL_TOL};

use crate::config::ExperimentConfig;
use crate::report::{Summary, Table, VarianceCheck, Verdict};
use crate::scenarios::{fmt, sub_seed};

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let base = make_pair(0.0, 3.0 * p.delta_a, p.delta_a, p.delta_l).expect("validated regime");
    let mut table = Table::new(&["check", "value", "bound"]);

    // Identity after every admissible actualization sequence up to the
    // configured depth, over all side patterns.
    let steps = p.actualization_steps;
    let mut max_residual = base.identity_residual();
    for pattern in 0..(1u32 << steps) {
        let mut rng = seed_stream(sub_seed(config.seed, 0x10 + u64::from(pattern)), 0);
        let mut pair = base;
        for step in 0..steps {
            let side = if pattern >> step & 1 == 1 {
                Side::A
            } else {
                Side::B
            };
            match actualize_local(&pair, side, &mut rng) {
                Ok(next) => pair = next,
                Err(CorrelationError::RegimeExhausted { .. }) => break,
                Err(e) => unreachable!("validated pair: {e}"),
            }
            max_residual = max_residual.max(pair.identity_residual());
        }
    }
    table.push(vec![
        "identity_residual_max".into(),
        fmt(max_residual),
        fmt(EXACT_IDENTITY_TOL),
    ]);

    // Monte Carlo oracle for the variance identity, both families.
    let mut variance_checks = Vec::new();
    let mut worst_rel = 0.0f64;
    for (tag, family) in [
        (1u64, DistributionFamily::Uniform),
        (2u64, DistributionFamily::Gaussian),
    ] {
        let chunk = 10_000u64;
        let chunks = p.oracle_samples.div_ceil(chunk);
        let sums = run_trials(sub_seed(config.seed, tag), chunks, |_, rng| {
            let mut acc = [0.0f64; 7];
            for _ in 0..chunk {
                let (a, b) = sample_positions(&base, family, rng);
                let l = b - a;
                acc[0] += a;
                acc[1] += a * a;
                acc[2] += b;
                acc[3] += b * b;
                acc[4] += l;
                acc[5] += l * l;
                acc[6] += 1.0;
            }
            acc
        });
        let mut total = [0.0f64; 7];
        for s in sums {
            for (t, v) in total.iter_mut().zip(s) {
                *t += v;
            }
        }
        let n = total[6];
        let var = |sum: f64, sumsq: f64| sumsq / n - (sum / n) * (sum / n);
        let var_a = var(total[0], total[1]);
        let var_b = var(total[2], total[3]);
        let var_l = var(total[4], total[5]);
        let rel = ((var_b - var_a - var_l) / var_b).abs();
        worst_rel = worst_rel.max(rel);
        let family_name = match family {
            DistributionFamily::Uniform => "uniform",
            DistributionFamily::Gaussian => "gaussian",
        };
        table.push(vec![
            format!("variance_residual_{family_name}"),
            fmt(rel),
            fmt(VARIANCE_ORACLE_REL_TOL),
        ]);
        variance_checks.push(VarianceCheck {
            family: family_name.into(),
            var_a,
            var_l,
            var_b,
            relative_residual: rel,
        });
    }

    // Nonsignaling, and the signaling mutant that must fail.
    let mut ns_rng = seed_stream(sub_seed(config.seed, 3), 0);
    let faithful =
        nonsignaling_test(&base, p.nonsignaling_trials, &mut ns_rng).expect("validated pair");
    let mut mutant_rng = seed_stream(sub_seed(config.seed, 4), 0);
    let mutant = nonsignaling_test_with_shift(
        &base,
        p.nonsignaling_trials,
        base.delta_b / 2.0,
        &mut mutant_rng,
    )
    .expect("validated pair");
    table.push(vec![
        "nonsignaling_tvd".into(),
        fmt(faithful.tvd),
        fmt(faithful.threshold),
    ]);
    table.push(vec![
        "mutant_tvd".into(),
        fmt(mutant.tvd),
        fmt(mutant.threshold),
    ]);

    let verdicts = vec![
        Verdict::checked(
            "entangle_identity_residual",
            max_residual,
            EXACT_IDENTITY_TOL,
        ),
        Verdict::checked(
            "entangle_variance_oracle",
            worst_rel,
            VARIANCE_ORACLE_REL_TOL,
        ),
        Verdict::checked(
            "entangle_nonsignaling_tvd",
            faithful.tvd,
            faithful.threshold,
        ),
        Verdict::boolean(
            "entangle_signaling_mutant_detected",
            !mutant.pass,
            format!(
                "mutant tvd {} vs threshold {}",
                mutant.tvd, mutant.threshold
            ),
        ),
    ];

    let summary = Summary::Entangle {
        max_identity_residual: max_residual,
        variance_checks,
        nonsignaling_tvd: faithful.tvd,
        nonsignaling_threshold: faithful.threshold,
        mutant_tvd: mutant.tvd,
    };
    (summary, verdicts, table)
}
