//! Divergence conservation and the cloning deficit.

use fiqsim_core::ensemble::run_trials;
use fiqsim_core::fiq::FiqState;
use fiqsim_core::grid::{GridDistribution, Permutation};
use fiqsim_core::nocloning::{
    clone_deficit, conservation_check, fiq_clone_deficit, kl_product_additivity, KlDivergence,
};
use fiqsim_core::propensity::Propensity;
use fiqsim_core::tolerances::EXACT_IDENTITY_TOL;
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::report::{Summary, Table, Verdict};
use crate::scenarios::{fmt, sub_seed};

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let cells = p.grid_cells;
    let mut table = Table::new(&["check", "value", "bound"]);

    // Conservation of K under random permutations of random pairs.
    let conservation: Vec<bool> = run_trials(sub_seed(config.seed, 1), p.permutations, |_, rng| {
        let p1 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let p2 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let pi = Permutation::random(cells, rng);
        conservation_check(&pi, &p1, &p2).expect("same grid")
    });
    let conservation_failures = conservation.iter().filter(|ok| !**ok).count() as u64;
    table.push(vec![
        "conservation_failures".into(),
        conservation_failures.to_string(),
        "0".into(),
    ]);

    // Deficit strictly positive for distinct finite-divergence pairs,
    // whatever the final machine states are.
    let deficits: Vec<(f64, bool)> = run_trials(sub_seed(config.seed, 2), p.pairs, |_, rng| {
        let p1 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let p2 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let qm1 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let qm2 = GridDistribution::random(cells, rng).expect("cells >= 2");
        let report = clone_deficit(&p1, &p2, &qm1, &qm2).expect("same grid");
        match report.deficit {
            KlDivergence::Finite(d) => (d, report.clonable),
            KlDivergence::Infinite => (f64::INFINITY, report.clonable),
        }
    });
    let min_deficit = deficits
        .iter()
        .map(|(d, _)| *d)
        .fold(f64::INFINITY, f64::min);
    let clonable_count = deficits.iter().filter(|(_, c)| *c).count() as u64;
    table.push(vec!["min_deficit".into(), fmt(min_deficit), "> 0".into()]);
    table.push(vec![
        "clonable_count".into(),
        clonable_count.to_string(),
        "0".into(),
    ]);

    // Delta distributions (infinite-precision idealization) are clonable.
    let mut delta_clonable = true;
    for (i, j) in [(0usize, 1usize), (0, cells - 1), (2 % cells, 2 % cells)] {
        let d1 = GridDistribution::delta(cells, i).expect("valid cell");
        let d2 = GridDistribution::delta(cells, j).expect("valid cell");
        let m = GridDistribution::uniform(cells).expect("cells >= 2");
        let report = clone_deficit(&d1, &d2, &m, &m).expect("same grid");
        delta_clonable &= report.clonable;
    }
    let s0 = FiqState::from_bits(&[0]).expect("bit");
    let s1 = FiqState::from_bits(&[1]).expect("bit");
    delta_clonable &= fiq_clone_deficit(&s0, &s1, 1).expect("depth 1").clonable;
    table.push(vec![
        "delta_clonable".into(),
        delta_clonable.to_string(),
        "true".into(),
    ]);

    // Shared factors cancel in the divergence of product states.
    let additivity_gaps = run_trials(sub_seed(config.seed, 3), 100, |_, rng| {
        let p1 = GridDistribution::random(8, rng).expect("grid");
        let p2 = GridDistribution::random(8, rng).expect("grid");
        let shared = GridDistribution::random(4, rng).expect("grid");
        let (joint, bare) = kl_product_additivity(&p1, &p2, &shared).expect("grids");
        match (joint, bare) {
            (KlDivergence::Finite(a), KlDivergence::Finite(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    });
    let additivity_max_gap = additivity_gaps.iter().copied().fold(0.0, f64::max);
    table.push(vec![
        "additivity_max_gap".into(),
        fmt(additivity_max_gap),
        fmt(EXACT_IDENTITY_TOL),
    ]);

    // Distinct finite-information states at the configured digit depth.
    let fiq_pairs = run_trials(sub_seed(config.seed, 4), 50, |_, rng| {
        let denom = rng.gen_range(3u64..=50);
        let n1 = rng.gen_range(1..denom);
        let mut n2 = rng.gen_range(1..denom);
        if n2 == n1 {
            n2 = if n1 == 1 { 2 } else { n1 - 1 };
        }
        let s1 = FiqState::from_biased(&[Propensity::new(n1, denom).expect("valid")]);
        let s2 = FiqState::from_biased(&[Propensity::new(n2, denom).expect("valid")]);
        fiq_clone_deficit(&s1, &s2, p.fiq_depth)
            .expect("validated depth")
            .clonable
    });
    let fiq_clonable = fiq_pairs.iter().filter(|c| **c).count() as u64;
    table.push(vec![
        "fiq_distinct_clonable_count".into(),
        fiq_clonable.to_string(),
        "0".into(),
    ]);

    let verdicts = vec![
        Verdict::boolean(
            "noclone_kl_conserved",
            conservation_failures == 0,
            format!("{} permutations checked", p.permutations),
        ),
        Verdict::boolean(
            "noclone_deficit_positive",
            min_deficit > 0.0 && clonable_count == 0,
            format!("min deficit {min_deficit} over {} pairs", p.pairs),
        ),
        Verdict::boolean(
            "noclone_delta_states_clonable",
            delta_clonable,
            "delta grid pairs and determined digit states",
        ),
        Verdict::checked(
            "noclone_product_additivity",
            additivity_max_gap,
            EXACT_IDENTITY_TOL,
        ),
        Verdict::boolean(
            "noclone_fiq_states_not_clonable",
            fiq_clonable == 0,
            "50 random distinct biased states",
        ),
    ];

    let summary = Summary::Noclone {
        conservation_checks: p.permutations,
        conservation_failures,
        min_deficit,
        clonable_count,
        delta_clonable,
        additivity_max_gap,
    };
    (summary, verdicts, table)
}
