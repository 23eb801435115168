use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::{Classifier, Dataset};
use crate::num::{round, sqrt};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features tried per split; `None` uses round(√p).
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 275, max_depth: 21, min_samples_split: 4, min_samples_leaf: 3, max_features: None, seed: 0 }
    }
}

/// Bagged Gini trees; probabilities are vote fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

impl Classifier for RandomForest {
    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1.0;
        }
        let n = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= n);
        votes
    }
}

pub fn fit_random_forest(data: &Dataset, params: &ForestParams) -> Result<RandomForest> {
    data.require_finite()?;
    data.require_two_classes()?;
    let p = data.n_features();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        min_samples_leaf: params.min_samples_leaf,
        max_features: Some(params.max_features.unwrap_or_else(|| (round(sqrt(p as f64)) as usize).max(1))),
    };
    let n = data.len();
    let trees = (0..params.trees.max(1))
        .map(|t| {
            // one independent stream per tree
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(t as u64);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            DecisionTree::grow(data, bootstrap, &tree_params, &mut rng)
        })
        .collect();
    Ok(RandomForest { trees, n_classes: data.n_classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn xor(n: usize, noise: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jitter = Normal::new(0.0, noise).unwrap();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let a: bool = rng.random();
            let b: bool = rng.random();
            let cx = if a { 1.0 } else { -1.0 };
            let cy = if b { 1.0 } else { -1.0 };
            x.push(vec![cx + jitter.sample(&mut rng), cy + jitter.sample(&mut rng)]);
            y.push((a ^ b) as usize);
        }
        Dataset::new(x, y, 2).unwrap()
    }

    #[test]
    fn separable_train_accuracy() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 37 % 11) as f64]).collect();
        let y: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let d = Dataset::new(x.clone(), y.clone(), 2).unwrap();
        let f = fit_random_forest(&d, &ForestParams { seed: 3, ..Default::default() }).unwrap();
        assert!(x.iter().zip(&y).all(|(r, &c)| f.predict(r) == c));
    }

    #[test]
    fn xor_generalizes() {
        let train = xor(200, 0.1, 1);
        let test = xor(200, 0.1, 2);
        let f = fit_random_forest(&train, &ForestParams { seed: 5, ..Default::default() }).unwrap();
        let acc = test.x.iter().zip(&test.y).filter(|(r, &c)| f.predict(r) == c).count() as f64 / 200.0;
        assert!(acc > 0.9, "xor accuracy {acc}");
    }

    #[test]
    fn deterministic_for_seed() {
        let d = xor(60, 0.3, 9);
        let a = fit_random_forest(&d, &ForestParams { trees: 20, seed: 4, ..Default::default() }).unwrap();
        let b = fit_random_forest(&d, &ForestParams { trees: 20, seed: 4, ..Default::default() }).unwrap();
        assert_eq!(a, b);
        let p = a.predict_proba(&[0.2, -0.4]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_class_fails() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![1, 1], 2).unwrap();
        assert!(fit_random_forest(&d, &ForestParams::default()).is_err());
    }
}
