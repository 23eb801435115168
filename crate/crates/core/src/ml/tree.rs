use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Classifier, Dataset};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features considered per split; `None` means all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 15, min_samples_split: 3, min_samples_leaf: 2, max_features: None }
    }
}

/// Gini impurity `1 − Σ pₖ²` of class counts.
pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n) * (c as f64 / n)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf { proba: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// CART classification tree grown on Gini impurity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_classes: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl DecisionTree {
    /// Grows a tree on the samples `idx` (repeats allowed, as in bootstraps).
    pub(crate) fn grow<R: Rng>(data: &Dataset, idx: Vec<usize>, params: &TreeParams, rng: &mut R) -> DecisionTree {
        let mut tree = DecisionTree { nodes: Vec::new(), n_classes: data.n_classes };
        tree.build(data, idx, 0, params, rng);
        tree
    }

    fn counts(data: &Dataset, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; data.n_classes];
        for &i in idx {
            c[data.y[i]] += 1;
        }
        c
    }

    fn build<R: Rng>(&mut self, data: &Dataset, idx: Vec<usize>, depth: usize, params: &TreeParams, rng: &mut R) -> usize {
        let counts = Self::counts(data, &idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let at = self.nodes.len();
        let leaf = Node::Leaf { proba: counts.iter().map(|&c| c as f64 / idx.len() as f64).collect() };
        if pure || depth >= params.max_depth || idx.len() < params.min_samples_split {
            self.nodes.push(leaf);
            return at;
        }
        let Some(best) = Self::best_split(data, &idx, params, rng) else {
            self.nodes.push(leaf);
            return at;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| data.x[i][best.feature] <= best.threshold);
        self.nodes.push(Node::Split { feature: best.feature, threshold: best.threshold, left: 0, right: 0 });
        let l = self.build(data, left, depth + 1, params, rng);
        let r = self.build(data, right, depth + 1, params, rng);
        if let Node::Split { left, right, .. } = &mut self.nodes[at] {
            *left = l;
            *right = r;
        }
        at
    }

    /// Lowest weighted child impurity; ties keep the lowest feature index,
    /// then the lowest threshold.
    fn best_split<R: Rng>(data: &Dataset, idx: &[usize], params: &TreeParams, rng: &mut R) -> Option<BestSplit> {
        let p = data.n_features();
        let mut features: Vec<usize> = match params.max_features {
            Some(m) if m < p => sample(rng, p, m.max(1)).into_vec(),
            _ => (0..p).collect(),
        };
        features.sort_unstable();

        let n = idx.len();
        let total = Self::counts(data, idx);
        let min_leaf = params.min_samples_leaf.max(1);
        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for &f in &features {
            order.sort_by(|&a, &b| data.x[a][f].total_cmp(&data.x[b][f]));
            let mut left = vec![0usize; data.n_classes];
            for pos in 0..n - 1 {
                left[data.y[order[pos]]] += 1;
                let lo = data.x[order[pos]][f];
                let hi = data.x[order[pos + 1]][f];
                let n_left = pos + 1;
                if lo == hi || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                let impurity = (n_left as f64 * gini(&left) + (n - n_left) as f64 * gini(&right)) / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity - 1e-12) {
                    let mid = 0.5 * (lo + hi);
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit { feature: f, threshold, impurity });
                }
            }
        }
        best
    }

    fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { proba } => return proba,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Feature and threshold of the root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }
}

impl Classifier for DecisionTree {
    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        self.leaf(x).to_vec()
    }
}

/// Greedy CART on all features; fully deterministic.
pub fn fit_decision_tree(data: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    data.require_finite()?;
    data.require_two_classes()?;
    // no feature subsampling, so the generator is never drawn from
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    Ok(DecisionTree::grow(data, (0..data.len()).collect(), params, &mut rng))
}
