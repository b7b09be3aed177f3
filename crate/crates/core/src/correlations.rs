//! Correlated indeterminacy: single-system branch collapse, the
//! entangled-pair analogue with its variance identity, nonsignaling, and
//! the CHSH harness.
//!
//! Two particles whose relative distance is constrained more tightly than
//! either position (Δl < min(Δa, Δb)) form the classical analogue of an
//! entangled pair: a local actualization on one side halves that side's
//! indeterminacy and, because Δl stays fixed, the other side's
//! indeterminacy must follow, via
//!
//! ```text
//! (Δb)² = (Δa)² + (Δl)²
//! ```
//!
//! The randomness of which half actualizes cannot be used to signal: the
//! ensemble marginal of the untouched side is unchanged. And since there
//! are no incompatible quantities, no strategy built from shared classical
//! randomness can push the CHSH value past 2.
//!
//! Convention: the Δ fields are interval widths (a state is
//! `center ± Δ/2`). When checking the variance identity by sampling, Δ is
//! read as a standard deviation via the explicit uniform-family conversion
//! width = √12·σ, which rescales all three Δ's alike and leaves the
//! identity intact.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::Interval;
use crate::fiq::FiqState;
use crate::propensity::{sample_bit, Propensity};
use crate::tolerances::{tvd_threshold, CHSH_CLASSICAL_BOUND, CHSH_SE_FACTOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("branch intervals must be disjoint")]
    OverlappingBranches,
    #[error("branch propensities must sum to 1")]
    BranchWeights,
    #[error("indeterminacies must be positive (got delta_a={0})")]
    NonPositiveIndeterminacy(f64),
    #[error("outside the modeled regime: delta_l {delta_l} >= delta_a {delta_a}")]
    RegimeViolated { delta_l: f64, delta_a: f64 },
    #[error("regime exhausted: further halving breaks delta_l < delta ({delta_l} >= {halved})")]
    RegimeExhausted { delta_l: f64, halved: f64 },
    #[error("mixture weights must be non-negative and sum to 1 (sum={0})")]
    MixtureWeights(f64),
    #[error("response table row {row} is not a distribution (sum={sum})")]
    TableRow { row: usize, sum: f64 },
}

// ---------------------------------------------------------------------------
// Single-system branching
// ---------------------------------------------------------------------------

/// A position state branched into two disjoint regions with propensities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchedPosition {
    pub left: Interval,
    pub right: Interval,
    pub p_left: Propensity,
    pub p_right: Propensity,
}

impl BranchedPosition {
    /// Two disjoint branches; `p_right` is forced to `1 - p_left`.
    pub fn new(
        left: Interval,
        right: Interval,
        p_left: Propensity,
    ) -> Result<Self, CorrelationError> {
        if left.hi >= right.lo {
            return Err(CorrelationError::OverlappingBranches);
        }
        Ok(BranchedPosition {
            left,
            right,
            p_left,
            p_right: p_left.complement(),
        })
    }
}

/// Actualize which branch the system occupies.
///
/// One branch is selected with its propensity; the selected branch's
/// propensity becomes 1 and the other 0, instantaneously and independently
/// of how far apart the branch regions lie.
pub fn collapse_branch<R: Rng + ?Sized>(state: &BranchedPosition, rng: &mut R) -> BranchedPosition {
    let take_left = sample_bit(state.p_left, rng) == 1;
    let (p_left, p_right) = if take_left {
        (Propensity::ONE, Propensity::ZERO)
    } else {
        (Propensity::ZERO, Propensity::ONE)
    };
    BranchedPosition {
        left: state.left,
        right: state.right,
        p_left,
        p_right,
    }
}

// ---------------------------------------------------------------------------
// Correlated pairs
// ---------------------------------------------------------------------------

/// Which side of a pair an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    A,
    B,
}

/// Distribution family for the position and relative-distance
/// indeterminacies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistributionFamily {
    #[default]
    Uniform,
    Gaussian,
}

impl DistributionFamily {
    /// Zero-mean sample whose width parameter is `delta` (support
    /// `±delta/2` for the uniform family; σ = delta/√12 for both families).
    fn sample_centered<R: Rng + ?Sized>(&self, delta: f64, rng: &mut R) -> f64 {
        match self {
            DistributionFamily::Uniform => (rng.gen::<f64>() - 0.5) * delta,
            DistributionFamily::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                z * delta / 12f64.sqrt()
            }
        }
    }
}

/// Two position states whose relative distance is constrained to
/// `l0 ± delta_l/2` with `delta_l` smaller than either local indeterminacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPair {
    pub a_center: f64,
    pub b_center: f64,
    /// Local position indeterminacy of A (interval width).
    pub delta_a: f64,
    /// Local position indeterminacy of B; `sqrt(delta_a² + delta_l²)`.
    pub delta_b: f64,
    /// Relative-distance indeterminacy, frozen for the scenario.
    pub delta_l: f64,
    /// Reference separation `b_center - a_center`.
    pub l0: f64,
}

/// Build a pair in the modeled regime `delta_l < delta_a`.
pub fn make_pair(
    a_center: f64,
    b_center: f64,
    delta_a: f64,
    delta_l: f64,
) -> Result<CorrelatedPair, CorrelationError> {
    if !(delta_a > 0.0) {
        return Err(CorrelationError::NonPositiveIndeterminacy(delta_a));
    }
    if !(delta_l >= 0.0) || delta_l >= delta_a {
        return Err(CorrelationError::RegimeViolated { delta_l, delta_a });
    }
    Ok(CorrelatedPair {
        a_center,
        b_center,
        delta_a,
        delta_b: (delta_a * delta_a + delta_l * delta_l).sqrt(),
        delta_l,
        l0: b_center - a_center,
    })
}

impl CorrelatedPair {
    /// Residual of the variance identity: `|Δ_wide² − Δ_narrow² − Δl²|`.
    ///
    /// The wide side is whichever was not actualized most recently; at
    /// construction that is B.
    pub fn identity_residual(&self) -> f64 {
        let wide = self.delta_a.max(self.delta_b);
        let narrow = self.delta_a.min(self.delta_b);
        (wide * wide - narrow * narrow - self.delta_l * self.delta_l).abs()
    }
}

/// Locally actualize one side of the pair.
///
/// The actualized side's indeterminacy halves, its center shifts to the
/// selected half (`±Δ/4`, each half with propensity 1/2); the other side's
/// indeterminacy is recomputed from the identity with `delta_l` held
/// constant, and its center follows the actualized side at separation
/// `l0`. Acting on a side whose indeterminacy has already shrunk to
/// `delta_l` or below is rejected: the relative constraint no longer
/// dominates and the halving story stops applying.
pub fn actualize_local<R: Rng + ?Sized>(
    pair: &CorrelatedPair,
    side: Side,
    rng: &mut R,
) -> Result<CorrelatedPair, CorrelationError> {
    let acted = match side {
        Side::A => pair.delta_a,
        Side::B => pair.delta_b,
    };
    if pair.delta_l >= acted {
        return Err(CorrelationError::RegimeExhausted {
            delta_l: pair.delta_l,
            halved: acted / 2.0,
        });
    }
    let halved = acted / 2.0;
    let shift = if sample_bit(Propensity::HALF, rng) == 1 {
        acted / 4.0
    } else {
        -acted / 4.0
    };
    let other = (halved * halved + pair.delta_l * pair.delta_l).sqrt();
    Ok(match side {
        Side::A => {
            let a_center = pair.a_center + shift;
            CorrelatedPair {
                a_center,
                b_center: a_center + pair.l0,
                delta_a: halved,
                delta_b: other,
                delta_l: pair.delta_l,
                l0: pair.l0,
            }
        }
        Side::B => {
            let b_center = pair.b_center + shift;
            CorrelatedPair {
                a_center: b_center - pair.l0,
                b_center,
                delta_a: other,
                delta_b: halved,
                delta_l: pair.delta_l,
                l0: pair.l0,
            }
        }
    })
}

/// Draw joint positions `(a, b)` from the pair:
/// `a ~ ρ_Δa` around `a_center`, `b = a + l` with `l ~ ρ_Δl` around `l0`.
pub fn sample_positions<R: Rng + ?Sized>(
    pair: &CorrelatedPair,
    family: DistributionFamily,
    rng: &mut R,
) -> (f64, f64) {
    let a = pair.a_center + family.sample_centered(pair.delta_a, rng);
    let l = pair.l0 + family.sample_centered(pair.delta_l, rng);
    (a, a + l)
}

// ---------------------------------------------------------------------------
// Nonsignaling
// ---------------------------------------------------------------------------

/// Outcome of a nonsignaling comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonsignalingReport {
    pub tvd: f64,
    pub threshold: f64,
    pub pass: bool,
    pub bins: usize,
    pub trials: u64,
}

/// Compare B's coarse-grained position distribution between ensembles
/// where A actualized and ensembles where it did not.
///
/// B positions are binned at resolution `delta_b/8`; pass iff the total
/// variation distance stays below `5·sqrt(bins/n)`.
pub fn nonsignaling_test<R: Rng + ?Sized>(
    pair: &CorrelatedPair,
    n_trials: u64,
    rng: &mut R,
) -> Result<NonsignalingReport, CorrelationError> {
    nonsignaling_test_with_shift(pair, n_trials, 0.0, rng)
}

/// Same comparison against a deliberately signaling mutant: B's sampled
/// position is displaced by `mutant_shift` only in the ensemble where A
/// actualized. A faithful model uses shift 0; any detectable shift must
/// make the test fail.
pub fn nonsignaling_test_with_shift<R: Rng + ?Sized>(
    pair: &CorrelatedPair,
    n_trials: u64,
    mutant_shift: f64,
    rng: &mut R,
) -> Result<NonsignalingReport, CorrelationError> {
    let family = DistributionFamily::Uniform;
    // Fixed binning over the supports of both ensembles (the mutant shift
    // widens the range so displaced mass stays countable).
    let half_support = (pair.delta_a + pair.delta_l) / 2.0 + mutant_shift.abs();
    let lo = pair.b_center - half_support;
    let hi = pair.b_center + half_support;
    let bin_width = pair.delta_b / 8.0;
    let bins = (((hi - lo) / bin_width).ceil() as usize).max(1);

    let mut with_act = vec![0u64; bins];
    let mut without_act = vec![0u64; bins];
    let clamp_bin = |b: f64| -> usize {
        let idx = ((b - lo) / bin_width).floor();
        (idx.max(0.0) as usize).min(bins - 1)
    };
    for _ in 0..n_trials {
        let actualized = actualize_local(pair, Side::A, rng)?;
        let (_, b) = sample_positions(&actualized, family, rng);
        with_act[clamp_bin(b + mutant_shift)] += 1;

        let (_, b) = sample_positions(pair, family, rng);
        without_act[clamp_bin(b)] += 1;
    }
    let tvd = total_variation(&with_act, &without_act, n_trials);
    let threshold = tvd_threshold(bins, n_trials);
    Ok(NonsignalingReport {
        tvd,
        threshold,
        pass: tvd <= threshold,
        bins,
        trials: n_trials,
    })
}

/// Total variation distance between two empirical histograms with `n`
/// samples each.
pub fn total_variation(left: &[u64], right: &[u64], n: u64) -> f64 {
    let n = n as f64;
    0.5 * left
        .iter()
        .zip(right)
        .map(|(&a, &b)| (a as f64 / n - b as f64 / n).abs())
        .sum::<f64>()
}

// ---------------------------------------------------------------------------
// CHSH harness
// ---------------------------------------------------------------------------

/// A deterministic local strategy: each party's ±1 response to its own
/// setting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDeterministic {
    /// Alice's responses to settings x = 0, 1.
    pub alice: [i8; 2],
    /// Bob's responses to settings y = 0, 1.
    pub bob: [i8; 2],
}

impl LocalDeterministic {
    /// All 16 deterministic local strategies.
    pub fn all() -> Vec<LocalDeterministic> {
        let signs = [1i8, -1i8];
        let mut out = Vec::with_capacity(16);
        for a0 in signs {
            for a1 in signs {
                for b0 in signs {
                    for b1 in signs {
                        out.push(LocalDeterministic {
                            alice: [a0, a1],
                            bob: [b0, b1],
                        });
                    }
                }
            }
        }
        out
    }

    /// Exact CHSH value S = E(0,0) + E(0,1) + E(1,0) − E(1,1).
    pub fn exact_chsh(&self) -> f64 {
        let e = |x: usize, y: usize| (self.alice[x] * self.bob[y]) as f64;
        e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1)
    }
}

/// Joint conditional outcome table p(a, b | x, y).
///
/// Rows are setting pairs in order (0,0), (0,1), (1,0), (1,1); columns are
/// outcome pairs (+,+), (+,−), (−,+), (−,−). Serializes as the flat
/// 16-entry row-major array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 16]", into = "[f64; 16]")]
pub struct ResponseTable {
    rows: [[f64; 4]; 4],
}

impl ResponseTable {
    pub fn new(rows: [[f64; 4]; 4]) -> Result<Self, CorrelationError> {
        for (row, dist) in rows.iter().enumerate() {
            let sum: f64 = dist.iter().sum();
            if dist.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(CorrelationError::TableRow { row, sum });
            }
        }
        Ok(ResponseTable { rows })
    }

    /// The no-signaling but nonlocal box with a·b = −1 exactly when
    /// x = y = 1; reaches S = 4. Harness sanity bound only — not reachable
    /// by any local strategy.
    pub fn pr_box() -> ResponseTable {
        let same = [0.5, 0.0, 0.0, 0.5];
        let anti = [0.0, 0.5, 0.5, 0.0];
        ResponseTable {
            rows: [same, same, same, anti],
        }
    }

    /// Exact correlator E(x, y) under the table.
    pub fn exact_correlator(&self, x: usize, y: usize) -> f64 {
        let row = &self.rows[2 * x + y];
        row[0] - row[1] - row[2] + row[3]
    }

    /// Exact CHSH value of the table.
    pub fn exact_chsh(&self) -> f64 {
        self.exact_correlator(0, 0) + self.exact_correlator(0, 1) + self.exact_correlator(1, 0)
            - self.exact_correlator(1, 1)
    }

    fn sample_outcome<R: Rng + ?Sized>(&self, x: usize, y: usize, rng: &mut R) -> (i8, i8) {
        let row = &self.rows[2 * x + y];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (idx, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return OUTCOMES[idx];
            }
        }
        OUTCOMES[3]
    }
}

const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

impl From<LocalDeterministic> for ResponseTable {
    fn from(s: LocalDeterministic) -> ResponseTable {
        let mut rows = [[0.0; 4]; 4];
        for x in 0..2 {
            for y in 0..2 {
                let a = s.alice[x];
                let b = s.bob[y];
                let idx = match (a, b) {
                    (1, 1) => 0,
                    (1, -1) => 1,
                    (-1, 1) => 2,
                    _ => 3,
                };
                rows[2 * x + y][idx] = 1.0;
            }
        }
        ResponseTable { rows }
    }
}

impl TryFrom<[f64; 16]> for ResponseTable {
    type Error = CorrelationError;

    fn try_from(flat: [f64; 16]) -> Result<Self, Self::Error> {
        let mut rows = [[0.0; 4]; 4];
        for (i, chunk) in flat.chunks_exact(4).enumerate() {
            rows[i].copy_from_slice(chunk);
        }
        ResponseTable::new(rows)
    }
}

impl From<ResponseTable> for [f64; 16] {
    fn from(t: ResponseTable) -> [f64; 16] {
        let mut flat = [0.0; 16];
        for (i, row) in t.rows.iter().enumerate() {
            flat[4 * i..4 * i + 4].copy_from_slice(row);
        }
        flat
    }
}

/// A strategy for the CHSH game.
///
/// Local strategies may consult shared classical randomness λ (drawn per
/// trial, independent of both settings) but never the remote setting;
/// arbitrary response tables exist only to sanity-check the harness with
/// nonlocal correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChshStrategy {
    Deterministic(LocalDeterministic),
    /// Convex mixture of deterministic strategies selected by shared λ.
    SharedRandom(Vec<(f64, LocalDeterministic)>),
    /// λ is a fresh 4-digit completion of a shared finite-information
    /// state; Alice's response to setting x reads digit x, Bob's response
    /// to setting y reads digit 2 + y (digit b ↦ 2b − 1).
    SharedFiq(FiqState),
    Table(ResponseTable),
}

impl ChshStrategy {
    /// Validate mixture weights.
    pub fn validate(&self) -> Result<(), CorrelationError> {
        if let ChshStrategy::SharedRandom(parts) = self {
            let sum: f64 = parts.iter().map(|(w, _)| *w).sum();
            if parts.iter().any(|(w, _)| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(CorrelationError::MixtureWeights(sum));
            }
        }
        Ok(())
    }

    fn respond<R: Rng + ?Sized>(&self, x: usize, y: usize, rng: &mut R) -> (i8, i8) {
        match self {
            ChshStrategy::Deterministic(s) => (s.alice[x], s.bob[y]),
            ChshStrategy::SharedRandom(parts) => {
                // Shared λ selects the component before either setting is
                // consulted.
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (w, s) in parts {
                    acc += w;
                    if u < acc {
                        return (s.alice[x], s.bob[y]);
                    }
                }
                let s = &parts.last().expect("validated non-empty mixture").1;
                (s.alice[x], s.bob[y])
            }
            ChshStrategy::SharedFiq(state) => {
                // One hidden-variable completion per trial; each party
                // reads only its own digits.
                let sign = |index: usize, rng: &mut R| {
                    2 * i8::try_from(sample_bit(state.propensity_at(index), rng)).expect("bit") - 1
                };
                let lambda = [sign(0, rng), sign(1, rng), sign(2, rng), sign(3, rng)];
                (lambda[x], lambda[2 + y])
            }
            ChshStrategy::Table(t) => t.sample_outcome(x, y, rng),
        }
    }
}

/// Monte Carlo CHSH estimate and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub s: f64,
    pub standard_error: f64,
    /// Per-setting correlators E(0,0), E(0,1), E(1,0), E(1,1).
    pub correlators: [f64; 4],
    pub trials: u64,
}

impl ChshEstimate {
    /// The bound every local strategy must respect:
    /// `|S| <= 2 + CHSH_SE_FACTOR · SE`.
    pub fn within_classical_bound(&self) -> bool {
        self.s.abs() <= CHSH_CLASSICAL_BOUND + CHSH_SE_FACTOR * self.standard_error
    }
}

/// Estimate S for a strategy over `n_trials` with uniform i.i.d. settings.
pub fn chsh_value<R: Rng + ?Sized>(
    strategy: &ChshStrategy,
    n_trials: u64,
    rng: &mut R,
) -> Result<ChshEstimate, CorrelationError> {
    strategy.validate()?;
    let mut sums = [0i64; 4];
    let mut counts = [0u64; 4];
    for _ in 0..n_trials {
        let x = usize::from(rng.gen::<bool>());
        let y = usize::from(rng.gen::<bool>());
        let (a, b) = strategy.respond(x, y, rng);
        sums[2 * x + y] += i64::from(a) * i64::from(b);
        counts[2 * x + y] += 1;
    }
    let mut correlators = [0.0; 4];
    let mut variance = 0.0;
    for i in 0..4 {
        let n = counts[i].max(1) as f64;
        let e = sums[i] as f64 / n;
        correlators[i] = e;
        variance += (1.0 - e * e) / n;
    }
    let s = correlators[0] + correlators[1] + correlators[2] - correlators[3];
    Ok(ChshEstimate {
        s,
        standard_error: variance.sqrt(),
        correlators,
        trials: n_trials,
    })
}

/// Exact maximum of |S| over all 16 deterministic local strategies.
pub fn chsh_max_deterministic() -> f64 {
    LocalDeterministic::all()
        .iter()
        .map(|s| s.exact_chsh().abs())
        .fold(0.0, f64::max)
}
