//! Deterministic ensemble execution.
//!
//! A trial is a pure function of `(master seed, trial index)`: each trial
//! draws from its own derived stream, results are collected in index
//! order, and any reduction happens sequentially afterwards. The parallel
//! and sequential paths therefore produce bit-identical output; the
//! `parallel` feature (default on) selects which one backs [`run_trials`].

use crate::rng::{seed_stream, TrialRng};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `trials` independent trials, each on its own derived stream, and
/// collect results in trial order.
pub fn run_trials<T, F>(master: u64, trials: u64, trial_fn: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        run_trials_par(master, trials, trial_fn)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_seq(master, trials, trial_fn)
    }
}

/// Sequential reference path.
pub fn run_trials_seq<T, F>(master: u64, trials: u64, trial_fn: F) -> Vec<T>
where
    F: Fn(u64, &mut TrialRng) -> T,
{
    (0..trials)
        .map(|index| {
            let mut rng = seed_stream(master, index);
            trial_fn(index, &mut rng)
        })
        .collect()
}

/// Data-parallel path; output order matches trial index order.
#[cfg(feature = "parallel")]
pub fn run_trials_par<T, F>(master: u64, trials: u64, trial_fn: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = seed_stream(master, index);
            trial_fn(index, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn sequential_is_deterministic() {
        let a = run_trials_seq(5, 100, |i, rng| (i, rng.gen::<u64>()));
        let b = run_trials_seq(5, 100, |i, rng| (i, rng.gen::<u64>()));
        assert_eq!(a, b);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential_bit_for_bit() {
        let seq = run_trials_seq(5, 500, |i, rng| (i, rng.gen::<u64>(), rng.gen::<f64>()));
        let par = run_trials_par(5, 500, |i, rng| (i, rng.gen::<u64>(), rng.gen::<f64>()));
        assert_eq!(seq, par);
    }

    #[test]
    fn trials_receive_independent_streams() {
        let draws = run_trials(9, 50, |_, rng| rng.gen::<u64>());
        let mut unique = draws.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), draws.len());
    }
}
