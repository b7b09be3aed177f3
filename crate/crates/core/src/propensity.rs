//! Exact rational propensities.
//!
//! A propensity quantifies the objective tendency of a binary digit to
//! actualize to 1. It is an exact rational in [0, 1], never a float:
//! state identity, branch weights, and bit sampling are all computed in
//! integer arithmetic, with floating point used only at the reporting
//! boundary (entropy, information content).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on a propensity's denominator.
///
/// Bounds the cost of exact arithmetic; see [`Propensity::with_max_denominator`]
/// to override per construction site.
pub const MAX_DENOMINATOR: u64 = 1_000_000_000;

/// Errors from propensity construction and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropensityError {
    /// Numerator exceeds denominator, so the value would exceed 1.
    #[error("propensity {numerator}/{denominator} lies outside [0, 1]")]
    OutOfRange { numerator: u64, denominator: u64 },
    /// Denominator is zero.
    #[error("propensity denominator must be nonzero")]
    ZeroDenominator,
    /// Reduced denominator exceeds the configured maximum.
    #[error("denominator {denominator} exceeds maximum {max}")]
    DenominatorTooLarge { denominator: u64, max: u64 },
    /// Text form is not `num/den` or a bare integer.
    #[error("cannot parse propensity from {input:?}")]
    Parse { input: String },
}

/// An exact rational in [0, 1]: the tendency of a bit to actualize to 1.
///
/// Stored reduced. `0` and `1` denote fully determined bits; `1/2` a fully
/// indeterminate one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct Propensity(Ratio<u64>);

impl Propensity {
    /// Fully determined 0 bit.
    pub const ZERO: Propensity = Propensity(Ratio::new_raw(0, 1));
    /// Fully determined 1 bit.
    pub const ONE: Propensity = Propensity(Ratio::new_raw(1, 1));
    /// Fully indeterminate bit.
    pub const HALF: Propensity = Propensity(Ratio::new_raw(1, 2));

    /// Construct `numerator/denominator`, validated against [`MAX_DENOMINATOR`].
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, PropensityError> {
        Self::with_max_denominator(numerator, denominator, MAX_DENOMINATOR)
    }

    /// Construct with an explicit denominator bound (applied after reduction).
    pub fn with_max_denominator(
        numerator: u64,
        denominator: u64,
        max: u64,
    ) -> Result<Self, PropensityError> {
        if denominator == 0 {
            return Err(PropensityError::ZeroDenominator);
        }
        if numerator > denominator {
            return Err(PropensityError::OutOfRange {
                numerator,
                denominator,
            });
        }
        let ratio = Ratio::new(numerator, denominator);
        if *ratio.denom() > max {
            return Err(PropensityError::DenominatorTooLarge {
                denominator: *ratio.denom(),
                max,
            });
        }
        Ok(Propensity(ratio))
    }

    /// Reduced numerator.
    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    /// Reduced denominator.
    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn is_one(&self) -> bool {
        self.numer() == self.denom()
    }

    /// True when the bit is already determined (propensity 0 or 1).
    pub fn is_determined(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    /// The complementary propensity 1 − q (tendency to actualize to 0).
    pub fn complement(&self) -> Propensity {
        Propensity(Ratio::new(self.denom() - self.numer(), self.denom()))
    }

    /// Float value, for reporting only.
    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl TryFrom<(u64, u64)> for Propensity {
    type Error = PropensityError;

    fn try_from((n, d): (u64, u64)) -> Result<Self, Self::Error> {
        Propensity::new(n, d)
    }
}

impl From<Propensity> for (u64, u64) {
    fn from(q: Propensity) -> (u64, u64) {
        (q.numer(), q.denom())
    }
}

impl fmt::Display for Propensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Propensity {
    type Err = PropensityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| PropensityError::Parse {
                input: s.to_owned(),
            })
        };
        match s.split_once('/') {
            Some((n, d)) => Propensity::new(parse(n)?, parse(d)?),
            None => Propensity::new(parse(s)?, 1),
        }
    }
}

/// Draw one bit that is 1 with probability exactly `q`.
///
/// Compares a lazily drawn uniform bit stream against the binary expansion
/// of `q`, digit by digit, so the outcome probability is the exact rational
/// `q` rather than a float threshold. Every drawn bit is consumed (no
/// rejection); the expected number of stream bits per call is 2. The result
/// is a pure function of `q` and the stream state.
pub fn sample_bit<R: Rng + ?Sized>(q: Propensity, rng: &mut R) -> u8 {
    if q.is_one() {
        return 1;
    }
    if q.is_zero() {
        return 0;
    }
    let den = u128::from(q.denom());
    let mut rem = u128::from(q.numer());
    loop {
        // Next binary digit of q by exact doubling of the remainder.
        rem *= 2;
        let q_digit = rem >= den;
        if q_digit {
            rem -= den;
        }
        let u_bit = rng.gen::<bool>();
        if u_bit != q_digit {
            // First differing digit decides U < q (digit of q is 1, of U is 0).
            return u8::from(q_digit);
        }
        if rem == 0 {
            // q is dyadic and all its remaining digits are 0: U >= q.
            return 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_stream;

    #[test]
    fn construction_bounds() {
        assert!(Propensity::new(2, 3).is_ok());
        assert!(Propensity::new(1, 1).is_ok());
        assert!(Propensity::new(0, 5).is_ok());
        assert_eq!(
            Propensity::new(4, 3),
            Err(PropensityError::OutOfRange {
                numerator: 4,
                denominator: 3
            })
        );
        assert_eq!(Propensity::new(1, 0), Err(PropensityError::ZeroDenominator));
        assert!(matches!(
            Propensity::new(1, MAX_DENOMINATOR + 1),
            Err(PropensityError::DenominatorTooLarge { .. })
        ));
        // Reduction happens before the bound check.
        assert!(Propensity::new(MAX_DENOMINATOR + 1, 2 * (MAX_DENOMINATOR + 1)).is_ok());
    }

    #[test]
    fn reduction_gives_canonical_identity() {
        assert_eq!(Propensity::new(2, 4).unwrap(), Propensity::HALF);
        assert_eq!(
            Propensity::new(6, 9).unwrap(),
            Propensity::new(2, 3).unwrap()
        );
    }

    #[test]
    fn complement_is_involutive() {
        let q = Propensity::new(3, 7).unwrap();
        assert_eq!(q.complement(), Propensity::new(4, 7).unwrap());
        assert_eq!(q.complement().complement(), q);
    }

    #[test]
    fn display_round_trips() {
        for q in [
            Propensity::ZERO,
            Propensity::ONE,
            Propensity::HALF,
            Propensity::new(2, 3).unwrap(),
        ] {
            assert_eq!(q.to_string().parse::<Propensity>().unwrap(), q);
        }
    }

    #[test]
    fn sample_bit_degenerate() {
        let mut rng = seed_stream(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_bit(Propensity::ONE, &mut rng), 1);
            assert_eq!(sample_bit(Propensity::ZERO, &mut rng), 0);
        }
    }

    #[test]
    fn sample_bit_frequency_two_thirds() {
        let q = Propensity::new(2, 3).unwrap();
        let n = 30_000u64;
        let mut rng = seed_stream(42, 0);
        let ones: u64 = (0..n).map(|_| u64::from(sample_bit(q, &mut rng))).sum();
        let p = 2.0 / 3.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (ones as f64 - n as f64 * p).abs();
        assert!(
            dev <= 3.0 * sigma,
            "deviation {dev} exceeds 3 sigma {sigma}"
        );
    }

    #[test]
    fn sample_bit_frequency_grid() {
        // Propensity sweep 0, 1/10, ..., 1 at 10^4 draws within 5 sigma.
        let n = 10_000u64;
        for k in 0..=10 {
            let q = Propensity::new(k, 10).unwrap();
            let mut rng = seed_stream(7, k);
            let ones: u64 = (0..n).map(|_| u64::from(sample_bit(q, &mut rng))).sum();
            let p = k as f64 / 10.0;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            let dev = (ones as f64 - n as f64 * p).abs();
            assert!(
                dev <= 5.0 * sigma.max(f64::EPSILON),
                "q={k}/10: deviation {dev} exceeds 5 sigma {sigma}"
            );
        }
    }

    #[test]
    fn sample_bit_dyadic_exactness() {
        // q = 1/4 compares exactly two digits of the stream.
        let q = Propensity::new(1, 4).unwrap();
        let n = 40_000u64;
        let mut rng = seed_stream(11, 3);
        let ones: u64 = (0..n).map(|_| u64::from(sample_bit(q, &mut rng))).sum();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        assert!((ones as f64 - n as f64 * 0.25).abs() <= 5.0 * sigma);
    }
}
