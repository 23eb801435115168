//! Feature assembly, classifiers and the cross-validation harness.

mod cv;
mod features;
mod forest;
mod logistic;
pub mod metrics;
mod mlp;
mod scaler;
mod tree;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::Label;
use crate::{Error, Result};

pub use cv::{cross_validate, evaluate, score, stratified_folds, train_eval, EvalReport, ModelReport, Scores};
pub use features::{assemble_features, feature_names, FeatureVector, SubjectDiagram, BETTI_SAMPLES, FEATURE_COUNT};
pub use forest::{fit_random_forest, ForestParams, RandomForest};
pub use logistic::{fit_logistic_regression, LogisticObjective, LogisticParams, LogisticRegression};
pub use mlp::{fit_mlp, Mlp, MlpParams};
pub use scaler::Standardizer;
pub use tree::{fit_decision_tree, gini, DecisionTree, TreeParams};

/// Samples as rows plus class indices `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<usize>, n_classes: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Input(format!("{} rows but {} labels", x.len(), y.len())));
        }
        let width = x.first().map_or(0, Vec::len);
        if x.iter().any(|r| r.len() != width) {
            return Err(Error::Input("rows have different lengths".into()));
        }
        if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::Input(format!("label {c} outside 0..{n_classes}")));
        }
        Ok(Dataset { x, y, n_classes })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            n_classes: self.n_classes,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = alloc::vec![0; self.n_classes];
        for &y in &self.y {
            c[y] += 1;
        }
        c
    }

    pub(crate) fn require_two_classes(&self) -> Result<()> {
        if self.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::Training("training data contains fewer than two classes".into()));
        }
        Ok(())
    }

    pub(crate) fn require_finite(&self) -> Result<()> {
        if let Some(i) = self.x.iter().position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(Error::Input(format!("sample {i} has a non-finite feature")));
        }
        Ok(())
    }
}

/// A trained model.
pub trait Classifier {
    /// Class probabilities, one per class.
    fn predict_proba(&self, x: &[f64]) -> Vec<f64>;

    /// Most probable class; ties go to the lowest index.
    fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = i;
        }
    }
    best
}

/// Which subjects are compared and how classes are indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    NsrVsMci,
    MciVsNonMci,
    ThreeClass,
}

impl Task {
    /// Class index for a label, or `None` if the task ignores it. In the
    /// binary tasks the anomaly (MCI) is the positive class 1.
    pub fn class_of(self, label: Label) -> Option<usize> {
        match (self, label) {
            (Task::NsrVsMci, Label::Nsr) => Some(0),
            (Task::NsrVsMci, Label::Mci) => Some(1),
            (Task::MciVsNonMci, Label::NonMci) => Some(0),
            (Task::MciVsNonMci, Label::Mci) => Some(1),
            (Task::ThreeClass, Label::Nsr) => Some(0),
            (Task::ThreeClass, Label::Mci) => Some(1),
            (Task::ThreeClass, Label::NonMci) => Some(2),
            _ => None,
        }
    }

    pub fn class_labels(self) -> Vec<Label> {
        match self {
            Task::NsrVsMci => alloc::vec![Label::Nsr, Label::Mci],
            Task::MciVsNonMci => alloc::vec![Label::NonMci, Label::Mci],
            Task::ThreeClass => alloc::vec![Label::Nsr, Label::Mci, Label::NonMci],
        }
    }

    pub fn n_classes(self) -> usize {
        self.class_labels().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::NsrVsMci => "nsr_vs_mci",
            Task::MciVsNonMci => "mci_vs_nonmci",
            Task::ThreeClass => "three_class",
        }
    }

    /// Builds the task's dataset, dropping subjects whose label it ignores.
    /// Returns the kept subject ids alongside.
    pub fn dataset(self, features: &[FeatureVector]) -> Result<(Dataset, Vec<String>)> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut ids = Vec::new();
        for f in features {
            if let Some(c) = self.class_of(f.label) {
                x.push(f.values.clone());
                y.push(c);
                ids.push(f.subject_id.clone());
            }
        }
        Ok((Dataset::new(x, y, self.n_classes())?, ids))
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "nsr_vs_mci" => Ok(Task::NsrVsMci),
            "mci_vs_nonmci" => Ok(Task::MciVsNonMci),
            "three_class" | "3class" => Ok(Task::ThreeClass),
            other => Err(Error::Parameter(format!("unknown task `{other}`"))),
        }
    }
}

/// A model family with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    RandomForest(ForestParams),
    DecisionTree(TreeParams),
    LogisticRegression(LogisticParams),
    Mlp(MlpParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::RandomForest(_) => "random_forest",
            ModelSpec::DecisionTree(_) => "decision_tree",
            ModelSpec::LogisticRegression(_) => "logistic_regression",
            ModelSpec::Mlp(_) => "mlp",
        }
    }

    /// Default hyperparameters for a model name.
    pub fn by_name(name: &str) -> Result<ModelSpec> {
        match name.trim().to_ascii_lowercase().as_str() {
            "random_forest" | "rf" => Ok(ModelSpec::RandomForest(ForestParams::default())),
            "decision_tree" | "dt" => Ok(ModelSpec::DecisionTree(TreeParams::default())),
            "logistic_regression" | "lr" => Ok(ModelSpec::LogisticRegression(LogisticParams::default())),
            "mlp" => Ok(ModelSpec::Mlp(MlpParams::default())),
            "svm" | "svm_rbf" => Err(Error::Parameter("kernel SVM is not provided".into())),
            other => Err(Error::Parameter(format!("unknown model `{other}`"))),
        }
    }

    /// Trains on `data`; `seed` drives every random choice.
    pub fn fit(&self, data: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        Ok(match self {
            ModelSpec::RandomForest(p) => {
                let mut p = p.clone();
                p.seed = seed;
                Box::new(fit_random_forest(data, &p)?)
            }
            ModelSpec::DecisionTree(p) => Box::new(fit_decision_tree(data, p)?),
            ModelSpec::LogisticRegression(p) => Box::new(fit_logistic_regression(data, p)?),
            ModelSpec::Mlp(p) => {
                let mut p = p.clone();
                p.seed = seed;
                Box::new(fit_mlp(data, &p)?)
            }
        })
    }
}
