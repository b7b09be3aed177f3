//! Core library for simulating indeterministic classical mechanics.
//!
//! Physical quantities are represented as finite lists of exact rational
//! propensities (a determined bit prefix, a biased zone, and an implicit
//! fair tail), so every state carries a finite amount of information.
//! On top of that representation the library provides:
//!
//! - indeterminacy-preserving and -amplifying dynamics (digit shift,
//!   free particle between elastic walls, measure-preserving grid maps),
//! - actualization policies that turn potentialities into definite bits
//!   (apparatus cut, spontaneous jumps, branch enumeration, Bayesian update),
//! - correlated-pair machinery with the variance identity, a nonsignaling
//!   check, and a CHSH harness with the classical bound of 2,
//! - Kullback-Leibler accounting showing that non-delta states cannot be
//!   cloned by measure-preserving evolution,
//! - deterministic digit-string completions that reproduce the stochastic
//!   description in distribution.
//!
//! All randomness flows through explicitly passed, seeded streams
//! ([`rng::seed_stream`]); ensemble runs are bit-reproducible regardless of
//! execution order (see [`ensemble`]).

// Validation sites use negated comparisons (`!(x >= 0.0)`) deliberately:
// the negated form rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actualization;
pub mod correlations;
pub mod dynamics;
pub mod ensemble;
pub mod fiq;
pub mod grid;
pub mod hidden_variables;
pub mod nocloning;
pub mod propensity;
pub mod rng;
pub mod tolerances;

pub use fiq::{FiqState, InfoReport};
pub use propensity::Propensity;
pub use rng::{seed_stream, TrialRng};
