//! Classification metrics. Probabilities are per-class rows; predictions and
//! truths are class indices.

use alloc::vec;
use alloc::vec::Vec;

/// `m[truth][predicted]` counts.
pub fn confusion(truth: &[usize], predicted: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

pub fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

fn f1_of_class(m: &[Vec<usize>], c: usize) -> f64 {
    let tp = m[c][c];
    let fp: usize = (0..m.len()).filter(|&r| r != c).map(|r| m[r][c]).sum();
    let fn_: usize = (0..m.len()).filter(|&p| p != c).map(|p| m[c][p]).sum();
    if 2 * tp + fp + fn_ == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
}

/// F1 of class 1 for two classes, otherwise the unweighted mean over classes.
pub fn f1(m: &[Vec<usize>]) -> f64 {
    match m.len() {
        0 | 1 => 0.0,
        2 => f1_of_class(m, 1),
        k => (0..k).map(|c| f1_of_class(m, c)).sum::<f64>() / k as f64,
    }
}

/// Cohen's kappa from a confusion matrix. Observed and chance agreement are
/// compared in integer arithmetic so a constant predictor gives exactly 0.
/// Returns 0 when chance agreement is already perfect.
pub fn cohen_kappa(m: &[Vec<usize>]) -> f64 {
    let k = m.len();
    let n: u128 = m.iter().flatten().map(|&v| v as u128).sum();
    if n == 0 {
        return 0.0;
    }
    let diag: u128 = (0..k).map(|i| m[i][i] as u128).sum();
    let row = |i: usize| m[i].iter().map(|&v| v as u128).sum::<u128>();
    let col = |j: usize| m.iter().map(|r| r[j] as u128).sum::<u128>();
    let chance: u128 = (0..k).map(|i| row(i) * col(i)).sum();
    // kappa = (n·diag − chance) / (n² − chance)
    let num = (n * diag) as i128 - chance as i128;
    let den = (n * n) as i128 - chance as i128;
    if den == 0 {
        return 0.0;
    }
    num as f64 / den as f64
}

/// Area under the ROC curve for scores of the positive class, via the
/// Mann-Whitney statistic with tied scores sharing their average rank.
/// `None` when either class is absent.
pub fn auc_binary(positive: &[bool], scores: &[f64]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum += avg * order[i..=j].iter().filter(|&&o| positive[o]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// Binary AUC on class 1 for two classes, otherwise the macro average of the
/// one-vs-rest AUCs over classes that are present and not universal.
pub fn auc(truth: &[usize], proba: &[Vec<f64>], n_classes: usize) -> Option<f64> {
    let one_vs_rest = |c: usize| {
        let pos: Vec<bool> = truth.iter().map(|&t| t == c).collect();
        let s: Vec<f64> = proba.iter().map(|p| p[c]).collect();
        auc_binary(&pos, &s)
    };
    if n_classes == 2 {
        return one_vs_rest(1);
    }
    let per: Vec<f64> = (0..n_classes).filter_map(one_vs_rest).collect();
    if per.is_empty() {
        None
    } else {
        Some(per.iter().sum::<f64>() / per.len() as f64)
    }
}
