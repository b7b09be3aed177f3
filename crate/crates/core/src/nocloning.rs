//! The cloning contradiction for states with ontic indeterminacy.
//!
//! The Kullback-Leibler divergence between two distributions is a constant
//! of motion under measure-preserving evolution. A hypothetical cloner
//! maps machine ⊗ system ⊗ register product states to machine' ⊗ system ⊗
//! system, so the divergence between the images of two distinct system
//! states grows by one extra copy of K(P1, P2) (plus whatever the final
//! machine states contribute). Conservation therefore forbids cloning
//! whenever K(P1, P2) is finite and nonzero; delta distributions — the
//! infinite-precision idealization — have infinite divergence and escape
//! the argument, which is why orthodox (real-numbered) classical states
//! can be copied.
//!
//! Divergences are in nats, following the natural logarithm of the
//! defining integral; information content elsewhere is in bits.

use serde::{Deserialize, Serialize};

use crate::fiq::FiqState;
use crate::grid::{liouville_permute, GridDistribution, GridError, Permutation};
use crate::tolerances::{EXACT_IDENTITY_TOL, MAX_FIQ_GRID_DEPTH};

/// A divergence value with infinity as an explicit tagged case, never a
/// float overflow. Serializes as the bare number, or `null` for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KlDivergence {
    Finite(f64),
    Infinite,
}

impl KlDivergence {
    pub fn is_infinite(&self) -> bool {
        matches!(self, KlDivergence::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            KlDivergence::Finite(v) => Some(*v),
            KlDivergence::Infinite => None,
        }
    }

    /// Equality with tolerance on the finite branch; infinities match
    /// infinities.
    pub fn approx_eq(&self, other: &KlDivergence, tol: f64) -> bool {
        match (self, other) {
            (KlDivergence::Finite(a), KlDivergence::Finite(b)) => (a - b).abs() < tol,
            (KlDivergence::Infinite, KlDivergence::Infinite) => true,
            _ => false,
        }
    }
}

/// K(P1, P2) = Σ P1 ln(P1/P2) in nats, with 0·ln 0 ≡ 0.
///
/// Returns [`KlDivergence::Infinite`] iff some cell has P1 > 0 and P2 = 0.
pub fn kl_divergence(
    p1: &GridDistribution,
    p2: &GridDistribution,
) -> Result<KlDivergence, GridError> {
    if p1.len() != p2.len() {
        return Err(GridError::GridMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    let mut total = 0.0;
    for (&a, &b) in p1.weights().iter().zip(p2.weights()) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(KlDivergence::Infinite);
        }
        total += a * (a / b).ln();
    }
    Ok(KlDivergence::Finite(total))
}

/// Evaluate K on a joint grid with a shared factor and on the bare factors:
/// returns `(K(P1 ⊗ R, P2 ⊗ R), K(P1, P2))`.
///
/// The first value is computed on the explicit product grid; the shared
/// factor must cancel, so the two results agree. This is the accounting
/// step that lets the tripartite divergence split into per-factor terms.
pub fn kl_product_additivity(
    p1: &GridDistribution,
    p2: &GridDistribution,
    shared: &GridDistribution,
) -> Result<(KlDivergence, KlDivergence), GridError> {
    let joint = kl_divergence(&p1.product(shared), &p2.product(shared))?;
    let bare = kl_divergence(p1, p2)?;
    Ok((joint, bare))
}

/// Is K conserved when both distributions are transported along `pi`?
///
/// True iff the divergences before and after agree within 1e-12, or both
/// are infinite. Must hold for every permutation.
pub fn conservation_check(
    pi: &Permutation,
    p1: &GridDistribution,
    p2: &GridDistribution,
) -> Result<bool, GridError> {
    let before = kl_divergence(p1, p2)?;
    let after = kl_divergence(&liouville_permute(p1, pi)?, &liouville_permute(p2, pi)?)?;
    Ok(before.approx_eq(&after, EXACT_IDENTITY_TOL))
}

/// Machine ⊗ system ⊗ register product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripartiteDistribution {
    pub machine: GridDistribution,
    pub system: GridDistribution,
    pub register: GridDistribution,
}

impl TripartiteDistribution {
    pub fn new(
        machine: GridDistribution,
        system: GridDistribution,
        register: GridDistribution,
    ) -> Self {
        TripartiteDistribution {
            machine,
            system,
            register,
        }
    }

    /// The explicit joint distribution (row-major over machine, system,
    /// register cells).
    pub fn joint(&self) -> GridDistribution {
        self.machine.product(&self.system).product(&self.register)
    }
}

/// Divergence accounting for a candidate cloner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneReport {
    /// K between the two initial joint states (only the system factors
    /// differ): K(P1s, P2s).
    pub k_initial: KlDivergence,
    /// K between the two final joint states demanded by copying:
    /// K(Qm1, Qm2) + 2·K(P1s, P2s).
    pub k_final_required: KlDivergence,
    /// What conservation cannot supply: `k_final_required - k_initial`.
    /// Zero when the initial divergence is infinite (the conservation
    /// equation is vacuous there).
    pub deficit: KlDivergence,
    pub clonable: bool,
}

/// Evaluate both sides of the conservation equation for a cloner that
/// takes system states `p1s`, `p2s` to final machine states `qm1`, `qm2`
/// while writing the system state into the register.
///
/// The machine and register factors of the two initial states are
/// identical, so the initial divergence is K(P1s, P2s). The final states
/// carry the system divergence twice (system and register) plus the final
/// machine divergence, which is non-negative for every choice of `qm1`,
/// `qm2` — hence the deficit is at least K(P1s, P2s), and cloning is
/// impossible unless that is zero (identical states) or infinite
/// (delta-function states with disjoint support).
pub fn clone_deficit(
    p1s: &GridDistribution,
    p2s: &GridDistribution,
    qm1: &GridDistribution,
    qm2: &GridDistribution,
) -> Result<CloneReport, GridError> {
    let k_system = kl_divergence(p1s, p2s)?;
    let k_machine = kl_divergence(qm1, qm2)?;
    let (k_final_required, deficit, clonable) = match (k_system, k_machine) {
        (KlDivergence::Infinite, _) => {
            // Conservation is vacuous: both sides infinite.
            (KlDivergence::Infinite, KlDivergence::Finite(0.0), true)
        }
        (KlDivergence::Finite(ks), KlDivergence::Infinite) => {
            let _ = ks;
            (KlDivergence::Infinite, KlDivergence::Infinite, false)
        }
        (KlDivergence::Finite(ks), KlDivergence::Finite(km)) => {
            let required = km + 2.0 * ks;
            let deficit = km + ks;
            (
                KlDivergence::Finite(required),
                KlDivergence::Finite(deficit),
                deficit.abs() <= EXACT_IDENTITY_TOL,
            )
        }
    };
    Ok(CloneReport {
        k_initial: k_system,
        k_final_required,
        deficit,
        clonable,
    })
}

/// Cloning verdict for two finite-information states, discretized to a
/// grid of 2^depth cells.
///
/// Cell weights are the products of per-digit propensities along the
/// cell's bit pattern. The final machine states are taken identical, the
/// most favorable choice for the cloner. Distinct propensities within
/// `depth` produce a positive deficit; fully determined prefixes of the
/// same depth land on disjoint delta cells and report clonable.
pub fn fiq_clone_deficit(
    s1: &FiqState,
    s2: &FiqState,
    depth: usize,
) -> Result<CloneReport, GridError> {
    if depth == 0 || depth > MAX_FIQ_GRID_DEPTH {
        return Err(GridError::NotMeasurePreserving(format!(
            "discretization depth {depth} outside 1..={MAX_FIQ_GRID_DEPTH}"
        )));
    }
    let p1 = discretize(s1, depth)?;
    let p2 = discretize(s2, depth)?;
    let machine = GridDistribution::uniform(2)?;
    clone_deficit(&p1, &p2, &machine, &machine)
}

/// Probability distribution of the first `depth` digits of a state.
pub fn discretize(state: &FiqState, depth: usize) -> Result<GridDistribution, GridError> {
    let cells = 1usize << depth;
    let mut weights = Vec::with_capacity(cells);
    for cell in 0..cells {
        let mut w = 1.0;
        for digit in 0..depth {
            let bit = (cell >> (depth - 1 - digit)) & 1;
            let q = state.propensity_at(digit).as_f64();
            w *= if bit == 1 { q } else { 1.0 - q };
        }
        weights.push(w);
    }
    GridDistribution::new(weights)
}
