//! Indeterminacy-preserving and -amplifying evolutions.
//!
//! Two concrete dynamics act on finite-information states and interval
//! particle states:
//!
//! - the binary shift map x → 2x mod 1, which consumes determined digits
//!   and amplifies indeterminacy without any floating-point orbit error;
//! - a free particle on a segment with perfectly elastic walls, whose
//!   position indeterminacy grows linearly, Δx(t) = t·δv₀, until it
//!   saturates the segment at the critical time t_c = ℓ/δv₀.
//!
//! Measure-preserving grid evolutions live in [`crate::grid`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fiq::FiqState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// A zero-width velocity interval never saturates the segment.
    #[error("deterministic velocity: no finite critical time")]
    DeterministicVelocity,
    /// Construction parameters violate the state geometry.
    #[error("invalid particle state: {0}")]
    InvalidParticle(String),
}

/// Closed interval [lo, hi] on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Degenerate single-point interval.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// One-dimensional particle on the segment [0, ℓ] with interval-valued
/// position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    /// Position interval, contained in [0, segment_length].
    pub position: Interval,
    /// Velocity interval; its width δv₀ is the ontic velocity indeterminacy.
    pub velocity: Interval,
    /// Segment length ℓ.
    pub segment_length: f64,
    /// Particle diameter d (coarse-graining scale for localization).
    pub diameter: f64,
}

impl ParticleState {
    pub fn new(
        position: Interval,
        velocity: Interval,
        segment_length: f64,
        diameter: f64,
    ) -> Result<Self, DynamicsError> {
        let bad = |msg: &str| Err(DynamicsError::InvalidParticle(msg.to_owned()));
        if !(segment_length > 0.0) {
            return bad("segment length must be positive");
        }
        if diameter < 0.0 {
            return bad("diameter must be non-negative");
        }
        if !(0.0 <= position.lo && position.lo <= position.hi && position.hi <= segment_length) {
            return bad("position interval must satisfy 0 <= lo <= hi <= segment length");
        }
        if !(velocity.lo <= velocity.hi) {
            return bad("velocity interval must satisfy lo <= hi");
        }
        Ok(ParticleState {
            position,
            velocity,
            segment_length,
            diameter,
        })
    }

    /// Velocity indeterminacy δv₀.
    pub fn velocity_spread(&self) -> f64 {
        self.velocity.width()
    }
}

/// Drop the first `steps` digit positions of a state (x → 2x mod 1 per step).
///
/// The determined prefix shrinks by up to `steps`; once the stored digits
/// are consumed, further steps act on the fair tail, which is
/// shift-invariant. Total information never increases.
pub fn bernoulli_shift(state: &FiqState, steps: usize) -> FiqState {
    let n = state.determined_len();
    if steps <= n {
        return FiqState::canonicalized(state.prefix()[steps..].to_vec(), state.biased().to_vec());
    }
    let zone_drop = (steps - n).min(state.biased().len());
    FiqState::canonicalized(Vec::new(), state.biased()[zone_drop..].to_vec())
}

/// Position indeterminacy Δx(t) = t·δv₀, clamped at the segment length.
pub fn spread_width(velocity_spread: f64, t: f64, segment_length: f64) -> f64 {
    (t * velocity_spread).min(segment_length)
}

/// Critical time t_c = ℓ/δv₀ at which the position indeterminacy
/// saturates the whole segment.
pub fn critical_time(segment_length: f64, velocity_spread: f64) -> Result<f64, DynamicsError> {
    if velocity_spread <= 0.0 {
        return Err(DynamicsError::DeterministicVelocity);
    }
    Ok(segment_length / velocity_spread)
}

/// Transport a particle state for time `t >= 0` with elastic walls at 0
/// and ℓ.
///
/// The transported position set {x + v·t} is an interval; reflections fold
/// it through the triangle wave of period 2ℓ. The folded image is computed
/// exactly from the endpoint images plus any wave extremum the raw interval
/// crosses; if the image covers the whole segment the position becomes
/// [0, ℓ]. Velocity magnitude is preserved; its sign follows the reflection
/// parity of the raw midpoint.
pub fn evolve_particle(state: &ParticleState, t: f64) -> ParticleState {
    let l = state.segment_length;
    let raw_lo = state.position.lo + state.velocity.lo * t;
    let raw_hi = state.position.hi + state.velocity.hi * t;

    let position = fold_interval(raw_lo, raw_hi, l);

    // Parity of the monotone segment containing the raw midpoint: even
    // segments keep the direction of travel, odd segments reverse it.
    let mid = 0.5 * (raw_lo + raw_hi);
    let k = (mid / l).floor() as i64;
    let velocity = if k.rem_euclid(2) == 0 {
        state.velocity
    } else {
        Interval::new(-state.velocity.hi, -state.velocity.lo)
    };

    ParticleState {
        position,
        velocity,
        segment_length: l,
        diameter: state.diameter,
    }
}

/// Image of [a, b] under the triangle-wave fold onto [0, l].
fn fold_interval(a: f64, b: f64, l: f64) -> Interval {
    let fa = fold_point(a, l);
    let fb = fold_point(b, l);
    let mut lo = fa.min(fb);
    let mut hi = fa.max(fb);
    // The image reaches l iff [a, b] contains an odd multiple of l, and 0
    // iff it contains an even multiple.
    if contains_multiple(a, b, l, 1) {
        hi = l;
    }
    if contains_multiple(a, b, l, 0) {
        lo = 0.0;
    }
    Interval::new(lo, hi)
}

/// Reflect a point into [0, l] (triangle wave of period 2l).
fn fold_point(x: f64, l: f64) -> f64 {
    let p = x.rem_euclid(2.0 * l);
    if p <= l {
        p
    } else {
        2.0 * l - p
    }
}

/// Does [a, b] contain some k·l with k ≡ parity (mod 2)?
fn contains_multiple(a: f64, b: f64, l: f64, parity: i64) -> bool {
    let k_min = (a / l).ceil() as i64;
    let k_max = (b / l).floor() as i64;
    if k_min > k_max {
        return false;
    }
    // An integer range of length >= 2 contains both parities.
    k_max - k_min >= 1 || k_min.rem_euclid(2) == parity
}
