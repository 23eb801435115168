use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, auc, cohen_kappa, confusion, f1};
use super::{Classifier, Dataset, FeatureVector, ModelSpec, Task};
use crate::ingest::Label;
use crate::num::{mean, sqrt, variance};
use crate::{Error, Result};

/// Fold index for every sample. Each class is shuffled with the seed and dealt
/// round-robin, continuing where the previous class stopped so fold sizes
/// differ by at most one.
pub fn stratified_folds(y: &[usize], n_classes: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Parameter(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; y.len()];
    let mut next = 0;
    let mut present = 0;
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        present += 1;
        if members.len() < folds {
            return Err(Error::Stratification(format!(
                "class {c} has {} samples, too few for {folds} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    if present < 2 {
        return Err(Error::Stratification("fewer than two classes present".into()));
    }
    Ok(fold_of)
}

/// Metrics of one set of predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    /// Undefined when a class is missing from the truth.
    pub auc: Option<f64>,
    pub f1: f64,
    pub kappa: f64,
    pub confusion: Vec<Vec<usize>>,
}

pub fn score(truth: &[usize], proba: &[Vec<f64>], n_classes: usize) -> Scores {
    let predicted: Vec<usize> = proba.iter().map(|p| super::argmax(p)).collect();
    let m = confusion(truth, &predicted, n_classes);
    Scores { accuracy: accuracy(truth, &predicted), auc: auc(truth, proba, n_classes), f1: f1(&m), kappa: cohen_kappa(&m), confusion: m }
}

/// Scores a trained model on a dataset.
pub fn evaluate(model: &dyn Classifier, data: &Dataset) -> Scores {
    let proba: Vec<Vec<f64>> = data.x.iter().map(|r| model.predict_proba(r)).collect();
    score(&data.y, &proba, data.n_classes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    pub spec: ModelSpec,
    pub fold_accuracies: Vec<f64>,
    pub accuracy_mean: f64,
    /// Population standard deviation across folds.
    pub accuracy_sd: f64,
    /// AUC, F1, kappa and confusion are computed on the pooled out-of-fold
    /// predictions.
    pub auc: Option<f64>,
    pub f1: f64,
    pub kappa: f64,
    pub confusion: Vec<Vec<usize>>,
    /// Out-of-fold class probabilities per sample.
    pub probabilities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub seed: u64,
    pub folds: usize,
    pub class_labels: Vec<Label>,
    pub sample_ids: Vec<String>,
    pub truth: Vec<usize>,
    pub fold_assignments: Vec<usize>,
    pub models: Vec<ModelReport>,
}

impl EvalReport {
    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == name)
    }
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Out-of-fold evaluation of one model under a fixed fold assignment.
pub fn cross_validate(data: &Dataset, spec: &ModelSpec, fold_of: &[usize], folds: usize, seed: u64) -> Result<ModelReport> {
    if fold_of.len() != data.len() {
        return Err(Error::Input(format!("{} fold assignments for {} samples", fold_of.len(), data.len())));
    }
    let mut proba = vec![Vec::new(); data.len()];
    let mut fold_accuracies = Vec::with_capacity(folds);
    for k in 0..folds {
        let test: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == k).collect();
        let train: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != k).collect();
        if test.is_empty() {
            return Err(Error::Stratification(format!("fold {k} is empty")));
        }
        let model = spec.fit(&data.subset(&train), fold_seed(seed, k))?;
        let test_set = data.subset(&test);
        let s = evaluate(model.as_ref(), &test_set);
        fold_accuracies.push(s.accuracy);
        for (&i, row) in test.iter().zip(&test_set.x) {
            proba[i] = model.predict_proba(row);
        }
    }
    let pooled = score(&data.y, &proba, data.n_classes);
    Ok(ModelReport {
        model: spec.name().into(),
        spec: spec.clone(),
        accuracy_mean: mean(&fold_accuracies),
        accuracy_sd: sqrt(variance(&fold_accuracies)),
        fold_accuracies,
        auc: pooled.auc,
        f1: pooled.f1,
        kappa: pooled.kappa,
        confusion: pooled.confusion,
        probabilities: proba,
    })
}

/// Stratified k-fold evaluation of every model on the task's subjects. All
/// models share one fold assignment drawn from `seed`.
pub fn train_eval(features: &[FeatureVector], task: Task, models: &[ModelSpec], folds: usize, seed: u64) -> Result<EvalReport> {
    let (data, ids) = task.dataset(features)?;
    data.require_two_classes().map_err(|_| Error::Stratification(format!("task {} needs two classes", task.as_str())))?;
    let fold_of = stratified_folds(&data.y, data.n_classes, folds, seed)?;
    let reports = models.iter().map(|m| cross_validate(&data, m, &fold_of, folds, seed)).collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        task,
        seed,
        folds,
        class_labels: task.class_labels(),
        sample_ids: ids,
        truth: data.y,
        fold_assignments: fold_of,
        models: reports,
    })
}
