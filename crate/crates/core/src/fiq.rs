//! Finite-information states.
//!
//! A [`FiqState`] describes one physical quantity as a binary fraction in
//! [0, 1) whose digits carry propensities: a determined prefix (digits with
//! propensity 0 or 1), a finite biased zone, and an implicit fair tail in
//! which every further digit has propensity 1/2. Because a fair digit
//! carries zero information, the total information content of any state is
//! finite by construction — the tail is never stored.
//!
//! Identity is exact: two states are the same state iff their prefixes and
//! biased zones agree element-wise as rationals. In particular a pure state
//! with first-digit propensity 2/3 is a different state from the mixture
//! {prefix 1 w.p. 2/3, prefix 0 w.p. 1/3}, even though single-digit
//! sampling statistics coincide.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::propensity::{Propensity, PropensityError};

/// Errors from state construction and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiqError {
    #[error(transparent)]
    Propensity(#[from] PropensityError),
    /// Canonical text form violated.
    #[error("cannot parse state from {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A finite-information state: determined prefix, biased zone, implicit
/// fair tail.
///
/// Canonical form: the prefix is the maximal fully-determined leading run.
/// A zone entry equal to 0 or 1 is promoted into the prefix when (and only
/// when) every entry before it is already determined; a determined entry
/// behind a strictly biased one stays in place, since digits actualize
/// independently.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiqState {
    prefix: Vec<u8>,
    biased: Vec<Propensity>,
}

impl FiqState {
    /// The fully indeterminate state: empty prefix, empty zone, fair tail.
    pub fn fair() -> Self {
        FiqState {
            prefix: Vec::new(),
            biased: Vec::new(),
        }
    }

    /// Build a state from determined bits and zone propensities.
    ///
    /// Bits must be 0 or 1. The result is canonicalized: leading determined
    /// zone entries are absorbed into the prefix.
    pub fn new(prefix: &[u8], biased: &[Propensity]) -> Result<Self, FiqError> {
        for &b in prefix {
            if b > 1 {
                return Err(FiqError::Parse {
                    input: format!("{b}"),
                    reason: "prefix bits must be 0 or 1".into(),
                });
            }
        }
        Ok(Self::canonicalized(prefix.to_vec(), biased.to_vec()))
    }

    /// State with only determined bits.
    pub fn from_bits(bits: &[u8]) -> Result<Self, FiqError> {
        Self::new(bits, &[])
    }

    /// State with only a biased zone (empty prefix).
    pub fn from_biased(zone: &[Propensity]) -> Self {
        Self::canonicalized(Vec::new(), zone.to_vec())
    }

    pub(crate) fn canonicalized(mut prefix: Vec<u8>, biased: Vec<Propensity>) -> Self {
        let mut rest = biased.into_iter().peekable();
        while let Some(q) = rest.peek() {
            if q.is_one() {
                prefix.push(1);
            } else if q.is_zero() {
                prefix.push(0);
            } else {
                break;
            }
            rest.next();
        }
        FiqState {
            prefix,
            biased: rest.collect(),
        }
    }

    /// Determined bits (digit values, most significant first).
    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// The biased zone following the prefix.
    pub fn biased(&self) -> &[Propensity] {
        &self.biased
    }

    /// Length of the determined prefix.
    pub fn determined_len(&self) -> usize {
        self.prefix.len()
    }

    /// Index one past the last explicitly stored digit; beyond this every
    /// digit is fair.
    pub fn stored_len(&self) -> usize {
        self.prefix.len() + self.biased.len()
    }

    /// Propensity of digit `index` (0-based), including the implicit tail.
    pub fn propensity_at(&self, index: usize) -> Propensity {
        if index < self.prefix.len() {
            if self.prefix[index] == 1 {
                Propensity::ONE
            } else {
                Propensity::ZERO
            }
        } else if index < self.stored_len() {
            self.biased[index - self.prefix.len()]
        } else {
            Propensity::HALF
        }
    }

    /// Exact identity: prefixes and zones equal element-wise as rationals.
    pub fn identical(&self, other: &FiqState) -> bool {
        self == other
    }

    /// The interval of values compatible with the determined prefix:
    /// `[lo, lo + 2^-N)` where `lo` is the prefix read as a binary fraction.
    pub fn to_interval(&self) -> (f64, f64) {
        let mut lo = 0.0;
        let mut scale = 0.5;
        for &b in &self.prefix {
            if b == 1 {
                lo += scale;
            }
            scale *= 0.5;
        }
        (lo, lo + 2.0 * scale)
    }

    /// Per-digit and total information content, in bits.
    pub fn total_information(&self) -> InfoReport {
        let per_bit: Vec<f64> = self
            .prefix
            .iter()
            .map(|_| 1.0)
            .chain(self.biased.iter().map(|q| info_content(*q)))
            .collect();
        let total = per_bit.iter().sum();
        InfoReport { per_bit, total }
    }
}

impl fmt::Display for FiqState {
    /// Canonical text form, e.g. `prefix=101;biased=2/3,1/4;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix=")?;
        for &b in &self.prefix {
            write!(f, "{b}")?;
        }
        write!(f, ";biased=")?;
        for (i, q) in self.biased.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}/{}", q.numer(), q.denom())?;
        }
        write!(f, ";")
    }
}

impl FromStr for FiqState {
    type Err = FiqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| FiqError::Parse {
            input: s.to_owned(),
            reason: reason.to_owned(),
        };
        let body = s.trim();
        let rest = body
            .strip_prefix("prefix=")
            .ok_or_else(|| err("missing `prefix=`"))?;
        let (bits, rest) = rest
            .split_once(';')
            .ok_or_else(|| err("missing `;` after prefix"))?;
        let rest = rest
            .strip_prefix("biased=")
            .ok_or_else(|| err("missing `biased=`"))?;
        let zone = rest
            .strip_suffix(';')
            .ok_or_else(|| err("missing trailing `;`"))?;

        let mut prefix = Vec::with_capacity(bits.len());
        for c in bits.chars() {
            match c {
                '0' => prefix.push(0),
                '1' => prefix.push(1),
                _ => return Err(err("prefix digits must be 0 or 1")),
            }
        }
        let mut biased = Vec::new();
        if !zone.is_empty() {
            for entry in zone.split(',') {
                biased.push(entry.parse::<Propensity>()?);
            }
        }
        Ok(FiqState::canonicalized(prefix, biased))
    }
}

/// Information accounting for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    /// Information content of each stored digit, in bits (prefix digits
    /// first, then the biased zone; the fair tail contributes nothing).
    pub per_bit: Vec<f64>,
    /// Sum of `per_bit`.
    pub total: f64,
}

/// Binary entropy H(q) in bits, with 0·log₂0 ≡ 0.
///
/// Both probabilities are evaluated from the exact rational, so
/// H(q) == H(1−q) holds bit-for-bit, not merely within rounding.
pub fn binary_entropy(q: Propensity) -> f64 {
    let p1 = q.numer() as f64 / q.denom() as f64;
    let p0 = (q.denom() - q.numer()) as f64 / q.denom() as f64;
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    term(p1) + term(p0)
}

/// Information content I(q) = 1 − H(q) in bits.
pub fn info_content(q: Propensity) -> f64 {
    1.0 - binary_entropy(q)
}
