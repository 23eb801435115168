//! Persistent homology over Z/2 and the summaries derived from it.

mod entropy;
mod reduction;

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use entropy::{
    aggregate_entropies, entropy_of_lifetimes, entropy_statistics, persistent_entropy, ClassEntropy, EntropySummary,
    LabeledDiagram,
};
pub use reduction::compute_persistence;

/// Homology dimensions reported downstream (components, loops, voids).
pub const FEATURE_DIMS: [usize; 3] = [0, 1, 2];

/// One bar. `death` is `f64::INFINITY` for classes that never die.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
    /// Filtration positions of the creating and (if any) destroying simplex.
    pub birth_simplex: usize,
    pub death_simplex: Option<usize>,
}

impl PersistencePair {
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// Lifetime with an infinite death replaced by `cap`.
    pub fn capped_lifetime(&self, cap: f64) -> f64 {
        self.death.min(cap) - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    /// `pairs[k]` holds the dimension-k bars.
    pub pairs: Vec<Vec<PersistencePair>>,
    /// Largest scale of the source filtration.
    pub epsilon_max: f64,
}

impl PersistenceDiagram {
    pub fn empty(max_dim: usize, epsilon_max: f64) -> Self {
        PersistenceDiagram { pairs: alloc::vec![Vec::new(); max_dim + 1], epsilon_max }
    }

    /// Bars of dimension `k`; empty if `k` was not computed.
    pub fn dim(&self, k: usize) -> &[PersistencePair] {
        self.pairs.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn total_bars(&self) -> usize {
        self.pairs.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &PersistencePair)> {
        self.pairs.iter().enumerate().flat_map(|(k, ps)| ps.iter().map(move |p| (k, p)))
    }
}

/// β_k(ε) sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiCurve {
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<usize>,
}

/// Counts the dimension-`k` bars alive at each grid scale (`b ≤ ε < d`).
pub fn betti_curve(diagram: &PersistenceDiagram, k: usize, grid: &[f64]) -> Result<BettiCurve> {
    if let Some(e) = grid.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(Error::Parameter(format!("grid scale {e} must be finite and non-negative")));
    }
    if !grid.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Parameter("grid must be sorted ascending".into()));
    }
    let bars = diagram.dim(k);
    let values = grid
        .iter()
        .map(|&e| bars.iter().filter(|p| p.birth <= e && e < p.death).count())
        .collect();
    Ok(BettiCurve { dim: k, grid: grid.to_vec(), values })
}

/// `count` evenly spaced scales on `[0, max]`, both ends included.
pub fn uniform_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..count).map(|i| max * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Drops finite bars shorter than `min_persistence`; infinite bars always stay.
pub fn prune_transient(diagram: &PersistenceDiagram, min_persistence: f64) -> Result<PersistenceDiagram> {
    if !(min_persistence >= 0.0) {
        return Err(Error::Parameter(format!("min_persistence must be non-negative, got {min_persistence}")));
    }
    let pairs = diagram
        .pairs
        .iter()
        .map(|ps| ps.iter().filter(|p| p.is_infinite() || p.lifetime() >= min_persistence).copied().collect())
        .collect();
    Ok(PersistenceDiagram { pairs, epsilon_max: diagram.epsilon_max })
}
