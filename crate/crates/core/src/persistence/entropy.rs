use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::PersistenceDiagram;
use crate::ingest::Label;
use crate::num::{ln, mean, variance};
use crate::{Error, Result};

/// Shannon entropy (nats) of normalized lifetimes, `−Σ pᵢ ln pᵢ` with
/// `pᵢ = lᵢ / Σ l`. Non-positive lifetimes are ignored.
///
/// This is the non-negative form; the raw sum `Σ pᵢ ln pᵢ` is its negation.
pub fn entropy_of_lifetimes(lifetimes: &[f64]) -> Option<f64> {
    let positive: Vec<f64> = lifetimes.iter().copied().filter(|&l| l > 0.0).collect();
    if positive.is_empty() {
        return None;
    }
    let total: f64 = positive.iter().sum();
    let e = -positive
        .iter()
        .map(|&l| {
            let p = l / total;
            p * ln(p)
        })
        .sum::<f64>();
    Some(e.max(0.0))
}

/// Persistent entropy of the dimension-`k` bars with infinite deaths capped
/// at `epsilon_cap`.
pub fn persistent_entropy(diagram: &PersistenceDiagram, k: usize, epsilon_cap: f64) -> Result<f64> {
    let lifetimes: Vec<f64> = diagram.dim(k).iter().map(|p| p.capped_lifetime(epsilon_cap)).collect();
    entropy_of_lifetimes(&lifetimes).ok_or(Error::UndefinedEntropy { dim: k })
}

/// A diagram tagged with its subject's class.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDiagram {
    pub label: Label,
    pub diagram: PersistenceDiagram,
}

/// Mean and population variance of persistent entropy for one class and dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntropy {
    pub label: Label,
    pub dim: usize,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    /// Ordered by class, then dimension.
    pub rows: Vec<ClassEntropy>,
}

impl EntropySummary {
    pub fn get(&self, label: Label, dim: usize) -> Option<&ClassEntropy> {
        self.rows.iter().find(|r| r.label == label && r.dim == dim)
    }
}

/// Groups `(class, dimension, entropy)` samples into per-class statistics.
pub fn aggregate_entropies(samples: &[(Label, usize, f64)]) -> EntropySummary {
    let mut keys: Vec<(Label, usize)> = samples.iter().map(|&(l, k, _)| (l, k)).collect();
    keys.sort();
    keys.dedup();
    let rows = keys
        .into_iter()
        .map(|(label, dim)| {
            let values: Vec<f64> = samples.iter().filter(|s| s.0 == label && s.1 == dim).map(|s| s.2).collect();
            ClassEntropy { label, dim, count: values.len(), mean: mean(&values), variance: variance(&values) }
        })
        .collect();
    EntropySummary { rows }
}

/// Per-class entropy statistics over `dims`, capping each diagram at its own
/// `epsilon_max`. Fails if any diagram has an undefined entropy.
pub fn entropy_statistics(diagrams: &[LabeledDiagram], dims: &[usize]) -> Result<EntropySummary> {
    if diagrams.is_empty() {
        return Err(Error::Parameter("entropy statistics need at least one diagram".into()));
    }
    let mut samples = Vec::with_capacity(diagrams.len() * dims.len());
    for d in diagrams {
        for &k in dims {
            samples.push((d.label, k, persistent_entropy(&d.diagram, k, d.diagram.epsilon_max)?));
        }
    }
    Ok(aggregate_entropies(&samples))
}
