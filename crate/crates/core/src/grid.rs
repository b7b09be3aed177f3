//! Discretized probability distributions on a finite cell grid, and
//! measure-preserving evolutions on them.
//!
//! Grid evolutions are permutations of cells rather than discretized
//! flows: they transport weight without any arithmetic, so conservation
//! laws (total mass, the weight multiset, and the Kullback-Leibler
//! divergence between any two distributions) hold to machine precision.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::GRID_NORMALIZATION_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("distribution must have at least one cell")]
    Empty,
    #[error("cell {cell} has negative weight {weight}")]
    NegativeWeight { cell: usize, weight: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("not measure-preserving: {0}")]
    NotMeasurePreserving(String),
    #[error("grid size mismatch: {left} vs {right} cells")]
    GridMismatch { left: usize, right: usize },
}

/// A normalized probability distribution over a fixed finite grid of cells.
///
/// Serializes as `{"cells": n, "weights": [...]}`; deserialization
/// re-validates normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDistributionRepr", into = "GridDistributionRepr")]
pub struct GridDistribution {
    cells: Vec<f64>,
}

/// Wire form: grid descriptor (cell count) plus the weight array.
#[derive(Serialize, Deserialize)]
struct GridDistributionRepr {
    cells: usize,
    weights: Vec<f64>,
}

impl TryFrom<GridDistributionRepr> for GridDistribution {
    type Error = GridError;

    fn try_from(repr: GridDistributionRepr) -> Result<Self, Self::Error> {
        if repr.cells != repr.weights.len() {
            return Err(GridError::GridMismatch {
                left: repr.cells,
                right: repr.weights.len(),
            });
        }
        GridDistribution::new(repr.weights)
    }
}

impl From<GridDistribution> for GridDistributionRepr {
    fn from(d: GridDistribution) -> GridDistributionRepr {
        GridDistributionRepr {
            cells: d.cells.len(),
            weights: d.cells,
        }
    }
}

impl GridDistribution {
    /// Validating constructor: non-negative weights summing to 1 within
    /// [`GRID_NORMALIZATION_TOL`].
    pub fn new(cells: Vec<f64>) -> Result<Self, GridError> {
        if cells.is_empty() {
            return Err(GridError::Empty);
        }
        for (cell, &weight) in cells.iter().enumerate() {
            if !(weight >= 0.0) {
                return Err(GridError::NegativeWeight { cell, weight });
            }
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > GRID_NORMALIZATION_TOL {
            return Err(GridError::NotNormalized { sum });
        }
        Ok(GridDistribution { cells })
    }

    /// Rescale arbitrary non-negative weights to total mass 1.
    pub fn from_unnormalized(cells: Vec<f64>) -> Result<Self, GridError> {
        if cells.is_empty() {
            return Err(GridError::Empty);
        }
        for (cell, &weight) in cells.iter().enumerate() {
            if !(weight >= 0.0) {
                return Err(GridError::NegativeWeight { cell, weight });
            }
        }
        let sum: f64 = cells.iter().sum();
        if sum <= 0.0 {
            return Err(GridError::NotNormalized { sum });
        }
        Ok(GridDistribution {
            cells: cells.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// Uniform distribution on `n` cells.
    pub fn uniform(n: usize) -> Result<Self, GridError> {
        if n == 0 {
            return Err(GridError::Empty);
        }
        Ok(GridDistribution {
            cells: vec![1.0 / n as f64; n],
        })
    }

    /// All mass on one cell: the infinite-precision (real-number) idealization.
    pub fn delta(n: usize, cell: usize) -> Result<Self, GridError> {
        if n == 0 || cell >= n {
            return Err(GridError::Empty);
        }
        let mut cells = vec![0.0; n];
        cells[cell] = 1.0;
        Ok(GridDistribution { cells })
    }

    /// Random dense distribution, for property sweeps.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, GridError> {
        let weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        Self::from_unnormalized(weights)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.cells
    }

    /// Tensor product with another factor (row-major cell order).
    pub fn product(&self, other: &GridDistribution) -> GridDistribution {
        let mut cells = Vec::with_capacity(self.len() * other.len());
        for &a in &self.cells {
            for &b in &other.cells {
                cells.push(a * b);
            }
        }
        GridDistribution { cells }
    }
}

/// A bijection on grid cells, the discrete stand-in for volume-preserving
/// phase-space flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    /// `targets[i]` is the cell that cell `i` maps to.
    targets: Vec<usize>,
}

impl Permutation {
    /// Validate that `targets` is a bijection on 0..n.
    pub fn new(targets: Vec<usize>) -> Result<Self, GridError> {
        let n = targets.len();
        let mut seen = vec![false; n];
        for &t in &targets {
            if t >= n {
                return Err(GridError::NotMeasurePreserving(format!(
                    "target {t} outside grid of {n} cells"
                )));
            }
            if seen[t] {
                return Err(GridError::NotMeasurePreserving(format!(
                    "cell {t} hit twice"
                )));
            }
            seen[t] = true;
        }
        Ok(Permutation { targets })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            targets: (0..n).collect(),
        }
    }

    /// Transposition of two cells.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self, GridError> {
        let mut targets: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(GridError::NotMeasurePreserving(format!(
                "swap {a},{b} outside grid of {n} cells"
            )));
        }
        targets.swap(a, b);
        Ok(Permutation { targets })
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut targets: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            targets.swap(i, j);
        }
        Permutation { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation, GridError> {
        if self.len() != other.len() {
            return Err(GridError::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Permutation {
            targets: self.targets.iter().map(|&t| other.targets[t]).collect(),
        })
    }

    pub fn target_of(&self, cell: usize) -> usize {
        self.targets[cell]
    }
}

/// Transport a distribution along a permutation of its cells.
///
/// Weight moves cell-wise with no arithmetic, so the weight multiset is
/// conserved exactly and KL divergences between co-evolved distributions
/// are invariant.
pub fn liouville_permute(
    p: &GridDistribution,
    pi: &Permutation,
) -> Result<GridDistribution, GridError> {
    if p.len() != pi.len() {
        return Err(GridError::GridMismatch {
            left: p.len(),
            right: pi.len(),
        });
    }
    let mut cells = vec![0.0; p.len()];
    for (i, &w) in p.weights().iter().enumerate() {
        cells[pi.target_of(i)] = w;
    }
    Ok(GridDistribution { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_stream;

    #[test]
    fn construction_validates() {
        assert!(GridDistribution::new(vec![]).is_err());
        assert!(GridDistribution::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(GridDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(GridDistribution::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0, 2]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn identity_leaves_distribution_unchanged() {
        let p = GridDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let id = Permutation::identity(4);
        assert_eq!(liouville_permute(&p, &id).unwrap(), p);
    }

    #[test]
    fn swap_twice_is_identity() {
        let p = GridDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let sw = Permutation::swap(4, 1, 3).unwrap();
        let once = liouville_permute(&p, &sw).unwrap();
        assert_ne!(once, p);
        assert_eq!(liouville_permute(&once, &sw).unwrap(), p);
    }

    #[test]
    fn weight_multiset_conserved_exactly() {
        let mut rng = seed_stream(5, 0);
        let p = GridDistribution::random(32, &mut rng).unwrap();
        let pi = Permutation::random(32, &mut rng);
        let moved = liouville_permute(&p, &pi).unwrap();
        let mut before: Vec<u64> = p.weights().iter().map(|w| w.to_bits()).collect();
        let mut after: Vec<u64> = moved.weights().iter().map(|w| w.to_bits()).collect();
        before.sort_unstable();
        after.sort_unstable();
        assert_eq!(before, after);
        let sum: f64 = moved.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let p = GridDistribution::uniform(4).unwrap();
        let pi = Permutation::identity(5);
        assert!(matches!(
            liouville_permute(&p, &pi),
            Err(GridError::GridMismatch { .. })
        ));
    }

    #[test]
    fn product_is_normalized_rowmajor() {
        let a = GridDistribution::new(vec![0.25, 0.75]).unwrap();
        let b = GridDistribution::new(vec![0.5, 0.5]).unwrap();
        let ab = a.product(&b);
        assert_eq!(ab.weights(), &[0.125, 0.125, 0.375, 0.375]);
    }

    #[test]
    fn serialization_carries_grid_descriptor() {
        let p = GridDistribution::new(vec![0.25, 0.75]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"cells":2,"weights":[0.25,0.75]}"#);
        let back: GridDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        // Unnormalized or mismatched payloads are rejected on the way in.
        assert!(
            serde_json::from_str::<GridDistribution>(r#"{"cells":2,"weights":[0.5,0.6]}"#).is_err()
        );
        assert!(
            serde_json::from_str::<GridDistribution>(r#"{"cells":3,"weights":[0.5,0.5]}"#).is_err()
        );
    }

    #[test]
    fn composition_matches_sequential_transport() {
        let mut rng = seed_stream(6, 1);
        let p = GridDistribution::random(16, &mut rng).unwrap();
        let pi1 = Permutation::random(16, &mut rng);
        let pi2 = Permutation::random(16, &mut rng);
        let seq = liouville_permute(&liouville_permute(&p, &pi1).unwrap(), &pi2).unwrap();
        let composed = liouville_permute(&p, &pi1.then(&pi2).unwrap()).unwrap();
        assert_eq!(seq, composed);
    }
}
