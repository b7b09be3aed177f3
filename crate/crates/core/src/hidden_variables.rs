//! Deterministic completion of finite-information states.
//!
//! The orthodox reading of classical mechanics assigns every quantity an
//! infinitely determined value — a real number. Relative to the
//! finite-information description, those reals are hidden variables: a
//! fully determined digit string consistent with the state's prefix, with
//! every undetermined digit filled by sampling its propensity once. After
//! completion, evolution is deterministic and consumes no randomness.
//!
//! Completions are truncated to `D` digits rather than actual reals; `D`
//! only needs to exceed the depth of any observation made of them, which
//! is what simulating the infinite-information idealization requires.
//!
//! [`equivalence_oracle`] is the module's acceptance instrument: completing
//! then evolving deterministically is statistically indistinguishable from
//! evolving the indeterminate state and measuring, which is what makes the
//! orthodox description an empirically equivalent completion.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actualization::measure;
use crate::dynamics::bernoulli_shift;
use crate::fiq::FiqState;
use crate::propensity::sample_bit;
use crate::tolerances::{tvd_threshold, MAX_COMPLETION_DEPTH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HiddenVariableError {
    #[error("completion depth {depth} exceeds maximum {max}")]
    DepthOverflow { depth: usize, max: usize },
    #[error("completion depth {depth} shallower than determined prefix {prefix_len}")]
    DepthBelowPrefix { depth: usize, prefix_len: usize },
    #[error("steps {steps} plus observation depth {observe} exceed completion depth {depth}")]
    ObservationOverflow {
        steps: usize,
        observe: usize,
        depth: usize,
    },
}

/// A truncated hidden variable: `digits.len()` fully determined digits
/// consistent with the source state's prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    digits: Vec<u8>,
    source: FiqState,
}

impl Completion {
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn source(&self) -> &FiqState {
        &self.source
    }

    /// Read the first `k` digits as an integer outcome (MSB first).
    pub fn leading_outcome(&self, k: usize) -> usize {
        self.digits[..k]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }
}

/// Complete a state to `depth` digits: determined digits are copied,
/// undetermined ones sampled from their propensities.
pub fn complete<R: Rng + ?Sized>(
    state: &FiqState,
    depth: usize,
    rng: &mut R,
) -> Result<Completion, HiddenVariableError> {
    if depth > MAX_COMPLETION_DEPTH {
        return Err(HiddenVariableError::DepthOverflow {
            depth,
            max: MAX_COMPLETION_DEPTH,
        });
    }
    if depth < state.determined_len() {
        return Err(HiddenVariableError::DepthBelowPrefix {
            depth,
            prefix_len: state.determined_len(),
        });
    }
    let mut digits = state.prefix().to_vec();
    for index in digits.len()..depth {
        digits.push(sample_bit(state.propensity_at(index), rng));
    }
    Ok(Completion {
        digits,
        source: state.clone(),
    })
}

/// Apply the digit-shift dynamics to a completion.
///
/// Fully deterministic: no randomness is consumed, and repeated evolution
/// of the same completion is bit-identical. The source state co-evolves so
/// the consistency invariant (digits extend the source prefix) is kept.
pub fn deterministic_evolve(completion: &Completion, steps: usize) -> Completion {
    let drop = steps.min(completion.digits.len());
    Completion {
        digits: completion.digits[drop..].to_vec(),
        source: bernoulli_shift(&completion.source, steps),
    }
}

/// Result of the completion-commutes-with-evolution comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub tvd: f64,
    pub threshold: f64,
    pub pass: bool,
    pub outcomes: usize,
    pub trials: u64,
}

/// Compare two paths to the distribution of the first `observe` digits
/// after `steps` shift steps:
///
/// 1. complete to `depth`, evolve deterministically, read digits;
/// 2. shift the indeterminate state, then measure digits.
///
/// Passes iff the total variation distance between the two empirical
/// distributions stays below `5·sqrt(2^observe / trials)`.
pub fn equivalence_oracle<R: Rng + ?Sized>(
    state: &FiqState,
    steps: usize,
    observe: usize,
    depth: usize,
    trials: u64,
    rng: &mut R,
) -> Result<EquivalenceReport, HiddenVariableError> {
    if steps + observe > depth {
        return Err(HiddenVariableError::ObservationOverflow {
            steps,
            observe,
            depth,
        });
    }
    let outcomes = 1usize << observe;
    let mut completed_counts = vec![0u64; outcomes];
    let mut measured_counts = vec![0u64; outcomes];

    let shifted = bernoulli_shift(state, steps);
    for _ in 0..trials {
        let completion = complete(state, depth, rng)?;
        let evolved = deterministic_evolve(&completion, steps);
        completed_counts[evolved.leading_outcome(observe)] += 1;

        let measured = measure(&shifted, observe, rng).expect("observe within depth cap");
        let outcome = measured.prefix()[..observe]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        measured_counts[outcome] += 1;
    }

    let tvd = crate::correlations::total_variation(&completed_counts, &measured_counts, trials);
    let threshold = tvd_threshold(outcomes, trials);
    Ok(EquivalenceReport {
        tvd,
        threshold,
        pass: tvd <= threshold,
        outcomes,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propensity::Propensity;
    use crate::rng::seed_stream;

    fn q(n: u64, d: u64) -> Propensity {
        Propensity::new(n, d).unwrap()
    }

    #[test]
    fn completion_of_determined_state_copies_prefix() {
        let s = FiqState::from_bits(&[1, 0, 1]).unwrap();
        let mut rng = seed_stream(20, 0);
        let c = complete(&s, 3, &mut rng).unwrap();
        assert_eq!(c.digits(), &[1, 0, 1]);
    }

    #[test]
    fn completion_consistent_with_prefix() {
        let s = FiqState::new(&[1, 0], &[q(2, 3)]).unwrap();
        for i in 0..100 {
            let mut rng = seed_stream(21, i);
            let c = complete(&s, 6, &mut rng).unwrap();
            assert_eq!(&c.digits()[..2], &[1, 0]);
            assert_eq!(c.digits().len(), 6);
        }
    }

    #[test]
    fn completion_marginals_match_propensities() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let n = 30_000u64;
        let mut ones = 0u64;
        for i in 0..n {
            let mut rng = seed_stream(22, i);
            ones += u64::from(complete(&s, 1, &mut rng).unwrap().digits()[0]);
        }
        let p = 2.0 / 3.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((ones as f64 - n as f64 * p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn completion_depth_validation() {
        let s = FiqState::from_bits(&[1, 1, 1]).unwrap();
        let mut rng = seed_stream(23, 0);
        assert!(matches!(
            complete(&s, 2, &mut rng),
            Err(HiddenVariableError::DepthBelowPrefix { .. })
        ));
        assert!(matches!(
            complete(&s, MAX_COMPLETION_DEPTH + 1, &mut rng),
            Err(HiddenVariableError::DepthOverflow { .. })
        ));
    }

    #[test]
    fn evolution_shifts_digits() {
        let s = FiqState::from_bits(&[1, 0, 1]).unwrap();
        let mut rng = seed_stream(24, 0);
        let c = complete(&s, 3, &mut rng).unwrap();
        let evolved = deterministic_evolve(&c, 1);
        assert_eq!(evolved.digits(), &[0, 1]);
        assert_eq!(deterministic_evolve(&c, 0), c);
    }

    #[test]
    fn evolution_is_deterministic() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4), q(4, 5)]);
        let mut rng = seed_stream(25, 0);
        let c = complete(&s, 8, &mut rng).unwrap();
        assert_eq!(deterministic_evolve(&c, 2), deterministic_evolve(&c, 2));
    }

    #[test]
    fn oracle_accepts_zero_steps() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let mut rng = seed_stream(26, 0);
        let report = equivalence_oracle(&s, 0, 1, 8, 20_000, &mut rng).unwrap();
        assert!(report.pass, "tvd={} thr={}", report.tvd, report.threshold);
    }

    #[test]
    fn oracle_accepts_fair_state_shift() {
        let s = FiqState::fair();
        let mut rng = seed_stream(27, 0);
        let report = equivalence_oracle(&s, 3, 2, 10, 20_000, &mut rng).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn oracle_accepts_biased_shift() {
        // After one shift of (2/3, 1/4), the leading digit has propensity 1/4
        // on both paths.
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4)]);
        let mut rng = seed_stream(28, 0);
        let report = equivalence_oracle(&s, 1, 1, 8, 20_000, &mut rng).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn oracle_rejects_overflow() {
        let s = FiqState::fair();
        let mut rng = seed_stream(29, 0);
        assert!(matches!(
            equivalence_oracle(&s, 6, 3, 8, 100, &mut rng),
            Err(HiddenVariableError::ObservationOverflow { .. })
        ));
    }

    #[test]
    fn no_randomness_after_completion() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4), q(4, 5), q(1, 2)]);
        let mut rng = seed_stream(30, 0);
        let c = complete(&s, 10, &mut rng).unwrap();
        let before = rng.clone();
        let _ = deterministic_evolve(&c, 3);
        // Stream untouched by evolution.
        assert_eq!(rng, before);
    }
}
