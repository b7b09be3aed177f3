//! Pinned verdict thresholds.
//!
//! Every statistical or numerical verdict emitted by the library and the
//! experiment runner uses a constant from this module; no driver carries
//! its own ad-hoc tolerance.

/// Exact-identity tolerance for float accounting that is algebraically
/// exact (information symmetry, variance identity, KL conservation).
pub const EXACT_IDENTITY_TOL: f64 = 1e-12;

/// Slope tolerance for the linear spread law fit, pre-saturation.
pub const SPREAD_SLOPE_TOL: f64 = 1e-9;

/// Sigma multiplier for binomial/multinomial frequency checks on
/// actualization ensembles.
pub const FREQUENCY_SIGMA: f64 = 5.0;

/// Sigma multiplier for total-variation-distance checks: the pass bound is
/// `TVD_SIGMA * sqrt(bins / n)`.
pub const TVD_SIGMA: f64 = 5.0;

/// Standard-error multiplier for the CHSH bound check:
/// `|S| <= 2 + CHSH_SE_FACTOR * SE`.
pub const CHSH_SE_FACTOR: f64 = 5.0;

/// Classical CHSH bound for local strategies.
pub const CHSH_CLASSICAL_BOUND: f64 = 2.0;

/// Relative tolerance for the Monte Carlo variance-identity oracle at
/// 10^6 samples.
pub const VARIANCE_ORACLE_REL_TOL: f64 = 0.01;

/// Normalization slack for grid distributions.
pub const GRID_NORMALIZATION_TOL: f64 = 1e-12;

/// Maximum digit depth a measurement may actualize.
pub const MAX_MEASURE_DEPTH: usize = 64;

/// Maximum branch-enumeration depth (2^depth branches).
pub const MAX_ENUM_DEPTH: usize = 20;

/// Maximum digit depth when discretizing a state onto a grid
/// (2^depth cells).
pub const MAX_FIQ_GRID_DEPTH: usize = 16;

/// Maximum hidden-variable completion depth, in digits.
pub const MAX_COMPLETION_DEPTH: usize = 64;

/// TVD threshold for `bins` outcome cells and `n` samples per ensemble.
pub fn tvd_threshold(bins: usize, n: u64) -> f64 {
    TVD_SIGMA * (bins as f64 / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tvd_threshold_formula() {
        assert_eq!(tvd_threshold(4, 100), TVD_SIGMA * 0.2);
        assert!(tvd_threshold(16, 100_000) > 0.0);
    }

    #[test]
    fn tvd_threshold_shrinks_with_samples() {
        assert!(tvd_threshold(8, 100_000) < tvd_threshold(8, 10_000));
    }
}
