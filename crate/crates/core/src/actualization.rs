//! Policies by which potentialities become actual.
//!
//! Standard dynamics never determines an indeterminate digit; some extra
//! process must. This module implements the four policy families the
//! library exposes — an apparatus with a finite determinacy depth that
//! forces actualization down to its own level, spontaneous Poisson jumps,
//! enumeration of all nonzero-propensity branches, and Bayesian
//! conditioning on an observed prefix — together with the boxed-observer
//! scenario in which an isolated measurement leaves the outside
//! description unchanged.
//!
//! Every policy can only add information: digits move from propensities
//! strictly inside (0, 1) to determined values, never back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fiq::FiqState;
use crate::propensity::{sample_bit, Propensity};
use crate::tolerances::{MAX_ENUM_DEPTH, MAX_MEASURE_DEPTH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActualizationError {
    #[error("measurement depth {depth} exceeds maximum {max}")]
    DepthExceeded { depth: usize, max: usize },
    #[error("enumeration depth {depth} exceeds maximum {max}")]
    EnumDepthExceeded { depth: usize, max: usize },
    #[error("zero-propensity event observed at digit {index}")]
    ZeroPropensityObserved { index: usize },
    #[error("observed bit {bit} at digit {index} is not 0 or 1")]
    InvalidObservedBit { index: usize, bit: u8 },
    #[error("jump rate must be non-negative (got {rate})")]
    NegativeRate { rate: f64 },
}

/// How and when indeterminate digits become definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActualizationPolicy {
    /// An apparatus of finite determinacy forces actualization down to its
    /// own depth, never beyond.
    ApparatusCut { depth: usize },
    /// Objective actualization at Poisson-distributed instants.
    SpontaneousJump { rate: f64, bits_per_jump: usize },
    /// No single outcome: every nonzero-propensity assignment obtains,
    /// carried with its exact weight.
    BranchAll { depth: usize },
    /// Propensities read as epistemic probabilities; actualization is
    /// conditioning on what the agent observed.
    BayesianUpdate,
}

impl ActualizationPolicy {
    /// Check parameter ranges (the enum already guarantees exactly one
    /// kind is active).
    pub fn validate(&self) -> Result<(), ActualizationError> {
        match *self {
            ActualizationPolicy::ApparatusCut { depth } if depth > MAX_MEASURE_DEPTH => {
                Err(ActualizationError::DepthExceeded {
                    depth,
                    max: MAX_MEASURE_DEPTH,
                })
            }
            ActualizationPolicy::SpontaneousJump { rate, .. } if !(rate >= 0.0) => {
                Err(ActualizationError::NegativeRate { rate })
            }
            ActualizationPolicy::BranchAll { depth } if depth > MAX_ENUM_DEPTH => {
                Err(ActualizationError::EnumDepthExceeded {
                    depth,
                    max: MAX_ENUM_DEPTH,
                })
            }
            _ => Ok(()),
        }
    }
}

/// All branches of a state up to some depth, with exact rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet {
    branches: Vec<(FiqState, BigRational)>,
}

impl BranchSet {
    pub fn branches(&self) -> &[(FiqState, BigRational)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Exact sum of branch weights; 1 by construction.
    pub fn weight_sum(&self) -> BigRational {
        self.branches
            .iter()
            .fold(BigRational::zero(), |acc, (_, w)| acc + w)
    }

    /// Exact check that the weights sum to 1.
    pub fn is_normalized(&self) -> bool {
        self.weight_sum().is_one()
    }

    /// Branch weights as floats, in branch order (reporting boundary only).
    pub fn weights_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.branches
            .iter()
            .map(|(_, w)| w.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Weight of the branch whose determined digits start with `pattern`,
    /// if present.
    pub fn weight_of(&self, pattern: &[u8]) -> Option<&BigRational> {
        self.branches
            .iter()
            .find(|(s, _)| {
                s.prefix().len() >= pattern.len() && &s.prefix()[..pattern.len()] == pattern
            })
            .map(|(_, w)| w)
    }
}

/// The two descriptions of an isolated measurement: the one made inside
/// the box and the one available outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerScenario {
    /// State assigned by the observer in the box after the interaction.
    pub inside_state: FiqState,
    /// State assigned outside; equals the pre-interaction state while the
    /// box stays isolated.
    pub outside_state: FiqState,
    pub box_isolated: bool,
}

/// Actualize every digit up to `depth` by sampling its propensity.
///
/// Digits already determined are untouched, so measuring at or below the
/// current prefix length is the identity and repeated measurement at the
/// same depth is idempotent. The input is unchanged (value semantics).
pub fn measure<R: Rng + ?Sized>(
    state: &FiqState,
    depth: usize,
    rng: &mut R,
) -> Result<FiqState, ActualizationError> {
    if depth > MAX_MEASURE_DEPTH {
        return Err(ActualizationError::DepthExceeded {
            depth,
            max: MAX_MEASURE_DEPTH,
        });
    }
    let n = state.determined_len();
    if depth <= n {
        return Ok(state.clone());
    }
    let mut prefix = state.prefix().to_vec();
    for index in n..depth {
        prefix.push(sample_bit(state.propensity_at(index), rng));
    }
    let consumed = depth - n;
    let biased = state.biased()[consumed.min(state.biased().len())..].to_vec();
    Ok(FiqState::canonicalized(prefix, biased))
}

/// Copenhagen-style cut: the system actualizes exactly to the apparatus's
/// own determinacy depth, never beyond.
pub fn apparatus_measure<R: Rng + ?Sized>(
    system: &FiqState,
    apparatus_depth: usize,
    rng: &mut R,
) -> Result<FiqState, ActualizationError> {
    measure(system, apparatus_depth, rng)
}

/// Objective collapse by discrete jumps: Poisson process of the given rate
/// on [0, duration], each jump actualizing the next undetermined digit
/// (up to the measurement depth cap).
///
/// Returns the evolved state and the jump times.
pub fn spontaneous_process<R: Rng + ?Sized>(
    state: &FiqState,
    rate: f64,
    duration: f64,
    rng: &mut R,
) -> (FiqState, Vec<f64>) {
    let mut jump_times = Vec::new();
    if rate > 0.0 && duration > 0.0 {
        let gaps = Exp::new(rate).expect("positive rate");
        let mut t = gaps.sample(rng);
        while t <= duration {
            jump_times.push(t);
            t += gaps.sample(rng);
        }
    }
    let mut current = state.clone();
    for _ in &jump_times {
        let next_depth = current.determined_len() + 1;
        if next_depth > MAX_MEASURE_DEPTH {
            break;
        }
        current = measure(&current, next_depth, rng).expect("depth within cap");
    }
    (current, jump_times)
}

/// Enumerate every possible outcome of actualizing the state down to
/// `depth` digits, with its exact weight.
///
/// `depth` counts digits from the start, like [`measure`]; branching
/// happens only over the undetermined digits inside the window, so a
/// window covering `k` undetermined digits yields up to 2^k branches.
/// Weights are exact rational products of the digit propensities and sum
/// to exactly 1; zero-propensity branches are omitted.
pub fn enumerate_branches(state: &FiqState, depth: usize) -> Result<BranchSet, ActualizationError> {
    if depth > MAX_ENUM_DEPTH {
        return Err(ActualizationError::EnumDepthExceeded {
            depth,
            max: MAX_ENUM_DEPTH,
        });
    }
    let n = state.determined_len();
    let mut branches: Vec<(Vec<u8>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    for index in n..depth {
        let q = state.propensity_at(index);
        let p1 = big_ratio(q);
        let p0 = big_ratio(q.complement());
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (bits, weight) in branches {
            for (bit, p) in [(1u8, &p1), (0u8, &p0)] {
                if p.is_zero() {
                    continue;
                }
                let mut extended = bits.clone();
                extended.push(bit);
                next.push((extended, &weight * p));
            }
        }
        branches = next;
    }
    let consumed = depth.saturating_sub(n);
    let branches = branches
        .into_iter()
        .map(|(bits, weight)| {
            let mut prefix = state.prefix().to_vec();
            prefix.extend_from_slice(&bits);
            let biased = state.biased()[consumed.min(state.biased().len())..].to_vec();
            (FiqState::canonicalized(prefix, biased), weight)
        })
        .collect();
    Ok(BranchSet { branches })
}

fn big_ratio(q: Propensity) -> BigRational {
    BigRational::new(BigInt::from(q.numer()), BigInt::from(q.denom()))
}

/// Condition a state on an observed digit prefix.
///
/// Observed digits become determined; unobserved propensities are
/// untouched (digits are independent). Observing a digit whose propensity
/// forbids the observed value is an error.
pub fn bayesian_update(
    state: &FiqState,
    observed_prefix: &[u8],
) -> Result<FiqState, ActualizationError> {
    let mut prefix = state.prefix().to_vec();
    for (index, &bit) in observed_prefix.iter().enumerate() {
        if bit > 1 {
            return Err(ActualizationError::InvalidObservedBit { index, bit });
        }
        let q = state.propensity_at(index);
        let impossible = (bit == 1 && q.is_zero()) || (bit == 0 && q.is_one());
        if impossible {
            return Err(ActualizationError::ZeroPropensityObserved { index });
        }
        if index < prefix.len() {
            // Consistency with the already determined digit was just checked.
            continue;
        }
        prefix.push(bit);
    }
    let consumed = observed_prefix.len().saturating_sub(state.determined_len());
    let biased = state.biased()[consumed.min(state.biased().len())..].to_vec();
    Ok(FiqState::canonicalized(prefix, biased))
}

/// Run the boxed-observer scenario: the friend measures to `friend_depth`
/// inside an isolated box, while outside no actualization can happen, so
/// the outside assignment stays the pre-interaction state.
pub fn wigner_friend_run<R: Rng + ?Sized>(
    state: &FiqState,
    friend_depth: usize,
    rng: &mut R,
) -> Result<WignerScenario, ActualizationError> {
    let inside_state = measure(state, friend_depth, rng)?;
    Ok(WignerScenario {
        inside_state,
        outside_state: state.clone(),
        box_isolated: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_stream;

    fn q(n: u64, d: u64) -> Propensity {
        Propensity::new(n, d).unwrap()
    }

    #[test]
    fn measure_noop_at_or_below_prefix() {
        let s = FiqState::from_bits(&[1]).unwrap();
        let mut rng = seed_stream(0, 0);
        assert_eq!(measure(&s, 1, &mut rng).unwrap(), s);
        assert_eq!(measure(&s, 0, &mut rng).unwrap(), s);
    }

    #[test]
    fn measure_certain_propensity_forces_bit() {
        // Propensity 1 on the first digit: canonicalization already puts it
        // in the prefix, and measuring reproduces the same state.
        let s = FiqState::from_biased(&[Propensity::ONE]);
        let mut rng = seed_stream(0, 1);
        let out = measure(&s, 1, &mut rng).unwrap();
        assert_eq!(out, FiqState::from_bits(&[1]).unwrap());
    }

    #[test]
    fn measure_depth_cap() {
        let s = FiqState::fair();
        let mut rng = seed_stream(0, 2);
        assert!(matches!(
            measure(&s, MAX_MEASURE_DEPTH + 1, &mut rng),
            Err(ActualizationError::DepthExceeded { .. })
        ));
    }

    #[test]
    fn measure_frequency_matches_propensity() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let n = 30_000u64;
        let mut ones = 0u64;
        for i in 0..n {
            let mut rng = seed_stream(21, i);
            let out = measure(&s, 1, &mut rng).unwrap();
            ones += u64::from(out.prefix()[0]);
        }
        let p = 2.0 / 3.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((ones as f64 - n as f64 * p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn measure_is_idempotent_at_fixed_depth() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4), q(9, 10)]);
        let mut r1 = seed_stream(8, 0);
        let once = measure(&s, 3, &mut r1).unwrap();
        let mut r2 = seed_stream(9, 7);
        let twice = measure(&once, 3, &mut r2).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn measure_grows_information() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4)]);
        let before = s.total_information().total;
        let mut rng = seed_stream(10, 0);
        let out = measure(&s, 2, &mut rng).unwrap();
        assert!(out.total_information().total > before);
        assert_eq!(out.determined_len(), 2);
    }

    #[test]
    fn apparatus_cut_limits_determinacy() {
        let s = FiqState::fair();
        let mut rng = seed_stream(3, 3);
        let out = apparatus_measure(&s, 3, &mut rng).unwrap();
        assert_eq!(out.determined_len(), 3);
        let again = apparatus_measure(&out, 3, &mut rng).unwrap();
        assert_eq!(again.determined_len(), 3);
        assert_eq!(apparatus_measure(&s, 0, &mut rng).unwrap(), s);
    }

    #[test]
    fn spontaneous_zero_rate_is_identity() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let mut rng = seed_stream(4, 0);
        let (out, jumps) = spontaneous_process(&s, 0.0, 10.0, &mut rng);
        assert_eq!(out, s);
        assert!(jumps.is_empty());
    }

    #[test]
    fn spontaneous_jump_count_statistics() {
        // rate 5, duration 2: mean 10 jumps; 10^4 runs within 3 sigma of
        // the Poisson mean.
        let s = FiqState::fair();
        let runs = 10_000u64;
        let mut total = 0u64;
        for i in 0..runs {
            let mut rng = seed_stream(31, i);
            let (_, jumps) = spontaneous_process(&s, 5.0, 2.0, &mut rng);
            total += jumps.len() as u64;
        }
        let mean = total as f64 / runs as f64;
        // Var of the per-run count is 10; the mean over runs has
        // sigma = sqrt(10/runs).
        let sigma = (10.0 / runs as f64).sqrt();
        assert!((mean - 10.0).abs() <= 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn spontaneous_prefix_grows_by_jump_count() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4)]);
        for i in 0..50 {
            let mut rng = seed_stream(32, i);
            let (out, jumps) = spontaneous_process(&s, 1.5, 3.0, &mut rng);
            let expected = (s.determined_len() + jumps.len()).min(MAX_MEASURE_DEPTH);
            assert_eq!(out.determined_len(), expected);
            for w in jumps.windows(2) {
                assert!(w[0] <= w[1], "jump times must be ordered");
            }
        }
    }

    #[test]
    fn branches_of_single_biased_digit() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let set = enumerate_branches(&s, 1).unwrap();
        assert_eq!(set.len(), 2);
        let w1 = set.weight_of(&[1]).unwrap();
        let w0 = set.weight_of(&[0]).unwrap();
        assert_eq!(w1, &BigRational::new(2.into(), 3.into()));
        assert_eq!(w0, &BigRational::new(1.into(), 3.into()));
        assert!(set.weight_sum().is_one());
    }

    #[test]
    fn zero_weight_branches_omitted() {
        let s = FiqState::from_biased(&[Propensity::ONE]);
        let set = enumerate_branches(&s, 1).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.weight_sum().is_one());
        assert_eq!(set.branches()[0].0, FiqState::from_bits(&[1]).unwrap());
    }

    #[test]
    fn forced_digits_do_not_branch() {
        // An embedded determined entry inside the window contributes a
        // forced digit, not a zero-weight branch.
        let s = FiqState::from_biased(&[q(2, 3), Propensity::ONE]);
        let set = enumerate_branches(&s, 2).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.weight_sum().is_one());
        assert!(set.weight_of(&[1, 1]).is_some());
        assert!(set.weight_of(&[0, 1]).is_some());
        assert!(set.weight_of(&[1, 0]).is_none());
    }

    #[test]
    fn branch_weights_sum_to_one_exactly() {
        let s = FiqState::new(&[1], &[q(2, 3), q(1, 7), q(9, 10)]).unwrap();
        for depth in 0..=5 {
            let set = enumerate_branches(&s, depth).unwrap();
            assert!(set.weight_sum().is_one(), "depth {depth}");
        }
    }

    #[test]
    fn enum_depth_cap() {
        assert!(matches!(
            enumerate_branches(&FiqState::fair(), MAX_ENUM_DEPTH + 1),
            Err(ActualizationError::EnumDepthExceeded { .. })
        ));
    }

    #[test]
    fn bayesian_conditioning() {
        let s = FiqState::from_biased(&[q(2, 3), q(1, 4)]);
        let out = bayesian_update(&s, &[1]).unwrap();
        assert_eq!(out.prefix(), &[1]);
        assert_eq!(out.biased(), &[q(1, 4)]);

        assert_eq!(bayesian_update(&s, &[]).unwrap(), s);

        let determined = FiqState::from_bits(&[1]).unwrap();
        assert!(matches!(
            bayesian_update(&determined, &[0]),
            Err(ActualizationError::ZeroPropensityObserved { index: 0 })
        ));
    }

    #[test]
    fn bayesian_consistent_with_existing_prefix() {
        let s = FiqState::new(&[1, 0], &[q(2, 3)]).unwrap();
        let out = bayesian_update(&s, &[1, 0, 1]).unwrap();
        assert_eq!(out.prefix(), &[1, 0, 1]);
        assert!(out.biased().is_empty());
    }

    #[test]
    fn wigner_outside_state_never_changes() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        for i in 0..200 {
            let mut rng = seed_stream(12, i);
            let scenario = wigner_friend_run(&s, 1, &mut rng).unwrap();
            assert!(scenario.outside_state.identical(&s));
            assert!(scenario.box_isolated);
            assert_eq!(scenario.inside_state.determined_len(), 1);
        }
    }

    #[test]
    fn wigner_zero_depth_inside_equals_outside() {
        let s = FiqState::from_biased(&[q(2, 3)]);
        let mut rng = seed_stream(13, 0);
        let scenario = wigner_friend_run(&s, 0, &mut rng).unwrap();
        assert_eq!(scenario.inside_state, scenario.outside_state);
    }

    #[test]
    fn policy_serialization_round_trip() {
        let policies = [
            ActualizationPolicy::ApparatusCut { depth: 3 },
            ActualizationPolicy::SpontaneousJump {
                rate: 5.0,
                bits_per_jump: 1,
            },
            ActualizationPolicy::BranchAll { depth: 4 },
            ActualizationPolicy::BayesianUpdate,
        ];
        for p in policies {
            assert!(p.validate().is_ok());
            let text = serde_json::to_string(&p).unwrap();
            let back: ActualizationPolicy = serde_json::from_str(&text).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn policy_validation_rejects_bad_parameters() {
        assert!(ActualizationPolicy::SpontaneousJump {
            rate: -1.0,
            bits_per_jump: 1
        }
        .validate()
        .is_err());
        assert!(ActualizationPolicy::ApparatusCut {
            depth: MAX_MEASURE_DEPTH + 1
        }
        .validate()
        .is_err());
        assert!(ActualizationPolicy::BranchAll {
            depth: MAX_ENUM_DEPTH + 1
        }
        .validate()
        .is_err());
    }
}
