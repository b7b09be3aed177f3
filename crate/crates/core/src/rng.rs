//! Seeded, splittable random streams.
//!
//! Every stochastic operation takes an explicitly passed stream. Ensemble
//! runs derive one independent stream per trial from `(master seed, trial
//! index)` using ChaCha's counter-based stream construction, so results are
//! bit-identical regardless of execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream used throughout the library.
pub type TrialRng = ChaCha8Rng;

/// Derive the independent stream for `run_index` under `master`.
///
/// Same `(master, run_index)` always yields the same draw sequence;
/// distinct indices select distinct ChaCha streams under the same key.
pub fn seed_stream(master: u64, run_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run_index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = seed_stream(99, 5);
        let mut b = seed_stream(99, 5);
        for _ in 0..1000 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn golden_fixture_master0_index0() {
        // Frozen fixture sequence: first draws of stream (0, 0). Guards
        // against silent changes to the stream construction, which would
        // invalidate every seeded expectation in the test suite.
        let mut rng = seed_stream(0, 0);
        let draws: Vec<u64> = (0..4).map(|_| rng.gen::<u64>()).collect();
        assert_eq!(
            draws,
            vec![
                13080132717333068652,
                8594738769458413623,
                12896916468484187878,
                1109962093070354556,
            ]
        );
    }

    #[test]
    fn distinct_indices_uncorrelated() {
        // Pairwise correlation sanity over the first 10^4 uniform draws.
        let n = 10_000;
        let streams = [seed_stream(3, 0), seed_stream(3, 1), seed_stream(3, 2)];
        let draws: Vec<Vec<f64>> = streams
            .into_iter()
            .map(|mut r| (0..n).map(|_| r.gen::<f64>()).collect())
            .collect();
        for i in 0..draws.len() {
            for j in (i + 1)..draws.len() {
                let r = pearson(&draws[i], &draws[j]);
                assert!(r.abs() < 0.05, "streams {i},{j} correlate: r={r}");
            }
        }
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        cov / (vx * vy).sqrt()
    }
}
