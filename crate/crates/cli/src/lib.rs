//! Experiment runner library: config schema, scenario drivers, and report
//! types behind the `fiqsim` binary.

// Negated comparisons in validation reject NaN along with range violations.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod scenarios;
