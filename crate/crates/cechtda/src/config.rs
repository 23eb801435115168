//! Flat `key = value` pipeline configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! rejected. `label.<annotation> = NSR|MCI|NONMCI` extends the rhythm table.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use cechtda_core::complex::FiltrationKind;
use cechtda_core::ingest::{Label, LabelMap, ThresholdRule, Wavelet};
use cechtda_core::ml::{ForestParams, LogisticParams, MlpParams, ModelSpec, Task, TreeParams};

use crate::error::{PipelineError, Result};

/// What one classification sample is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    /// One point cloud per subject.
    Subject,
    /// Each subject's trials are cut into blocks of `segment_trials` rows,
    /// one point cloud per block.
    Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub baseline: bool,
    pub median_win1_ms: f64,
    pub median_win2_ms: f64,
    pub denoise: bool,
    pub wavelet: Wavelet,
    pub dwt_level: usize,
    pub threshold: ThresholdRule,
    pub trial_s: f64,
    pub unit: Unit,
    pub segment_trials: usize,
    pub center_rows: bool,
    pub embed_dim: usize,
    pub complex_kind: FiltrationKind,
    /// `None` uses each cloud's enclosing-ball diameter.
    pub epsilon_max: Option<f64>,
    pub max_dim: usize,
    pub verify_tol: f64,
    pub min_persistence: f64,
    pub task: Task,
    pub models: Vec<String>,
    pub folds: usize,
    pub forest: ForestParams,
    pub tree: TreeParams,
    pub logistic: LogisticParams,
    pub mlp: MlpParams,
    pub seed: u64,
    pub labels: LabelMap,
    /// Extra `label.*` entries in input order, kept for the snapshot.
    label_overrides: Vec<(String, Label)>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            baseline: true,
            median_win1_ms: 200.0,
            median_win2_ms: 600.0,
            denoise: true,
            wavelet: Wavelet::Db4,
            dwt_level: 4,
            threshold: ThresholdRule::Universal,
            trial_s: 4.0,
            unit: Unit::Subject,
            segment_trials: 10,
            center_rows: true,
            embed_dim: 3,
            complex_kind: FiltrationKind::Cech,
            epsilon_max: None,
            max_dim: 3,
            verify_tol: 1e-9,
            min_persistence: 0.0,
            task: Task::NsrVsMci,
            models: ["random_forest", "decision_tree", "logistic_regression", "mlp"].map(String::from).to_vec(),
            folds: 5,
            forest: ForestParams::default(),
            tree: TreeParams::default(),
            logistic: LogisticParams::default(),
            mlp: MlpParams::default(),
            seed: 0,
            labels: LabelMap::default(),
            label_overrides: Vec::new(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| PipelineError::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(PipelineError::Config(format!("`{key}`: expected true or false, got `{value}`"))),
    }
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse(key, value)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(PipelineError::Config(format!("`{key}` must be positive, got {value}")));
    }
    Ok(v)
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse(key, value)?;
    if v == 0 {
        return Err(PipelineError::Config(format!("`{key}` must be at least 1")));
    }
    Ok(v)
}

fn core_err(key: &str) -> impl FnOnce(cechtda_core::Error) -> PipelineError + '_ {
    move |e| PipelineError::Config(format!("`{key}`: {e}"))
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(&text).map_err(|e| match e {
            PipelineError::Config(msg) => PipelineError::parse(path, 0, msg),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| PipelineError::Config(format!("line {}: {}", i + 1, e.to_string().trim_start_matches("config: "))))?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(annotation) = key.strip_prefix("label.") {
            let label: Label = value.parse().map_err(core_err(key))?;
            self.labels.insert(annotation, label);
            self.label_overrides.push((annotation.to_string(), label));
            return Ok(());
        }
        match key {
            "baseline" => self.baseline = parse_bool(key, value)?,
            "median_win1_ms" => self.median_win1_ms = parse_positive(key, value)?,
            "median_win2_ms" => self.median_win2_ms = parse_positive(key, value)?,
            "denoise" => self.denoise = parse_bool(key, value)?,
            "wavelet" => self.wavelet = value.parse().map_err(core_err(key))?,
            "dwt_level" => self.dwt_level = parse_count(key, value)?,
            "threshold" => {
                self.threshold = match value.to_ascii_lowercase().as_str() {
                    "universal" => ThresholdRule::Universal,
                    _ => {
                        let t: f64 = parse(key, value)?;
                        if t.is_nan() || t < 0.0 {
                            return Err(PipelineError::Config(format!("`{key}` must be `universal` or ≥ 0")));
                        }
                        ThresholdRule::Fixed(t)
                    }
                }
            }
            "trial_s" => self.trial_s = parse_positive(key, value)?,
            "unit" => {
                self.unit = match value.to_ascii_lowercase().as_str() {
                    "subject" => Unit::Subject,
                    "segment" => Unit::Segment,
                    _ => return Err(PipelineError::Config(format!("`{key}` must be subject or segment"))),
                }
            }
            "segment_trials" => self.segment_trials = parse_count(key, value)?,
            "center_rows" => self.center_rows = parse_bool(key, value)?,
            "embed_dim" => self.embed_dim = parse_count(key, value)?,
            "complex_kind" => self.complex_kind = value.parse().map_err(core_err(key))?,
            "epsilon_max" => {
                self.epsilon_max = if value.eq_ignore_ascii_case("auto") { None } else { Some(parse_positive(key, value)?) }
            }
            "max_dim" => self.max_dim = parse(key, value)?,
            "verify_tol" => {
                let t: f64 = parse(key, value)?;
                if t.is_nan() || t < 0.0 {
                    return Err(PipelineError::Config(format!("`{key}` must be ≥ 0")));
                }
                self.verify_tol = t;
            }
            "min_persistence" => {
                let t: f64 = parse(key, value)?;
                if t.is_nan() || t < 0.0 {
                    return Err(PipelineError::Config(format!("`{key}` must be ≥ 0")));
                }
                self.min_persistence = t;
            }
            "task" => self.task = value.parse().map_err(core_err(key))?,
            "models" => {
                let models: Vec<String> = value.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
                for m in &models {
                    ModelSpec::by_name(m).map_err(core_err(key))?;
                }
                if models.is_empty() {
                    return Err(PipelineError::Config(format!("`{key}` lists no model")));
                }
                self.models = models;
            }
            "folds" => self.folds = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "rf_trees" => self.forest.trees = parse_count(key, value)?,
            "rf_max_depth" => self.forest.max_depth = parse_count(key, value)?,
            "rf_min_split" => self.forest.min_samples_split = parse_count(key, value)?,
            "rf_min_leaf" => self.forest.min_samples_leaf = parse_count(key, value)?,
            "dt_max_depth" => self.tree.max_depth = parse_count(key, value)?,
            "dt_min_split" => self.tree.min_samples_split = parse_count(key, value)?,
            "dt_min_leaf" => self.tree.min_samples_leaf = parse_count(key, value)?,
            "lr_c" => self.logistic.c = parse_positive(key, value)?,
            "lr_max_iter" => self.logistic.max_iter = parse_count(key, value)?,
            "lr_tol" => self.logistic.tol = parse_positive(key, value)?,
            "mlp_layers" => {
                self.mlp.hidden = value.split(',').map(|w| parse_count(key, w)).collect::<Result<_>>()?;
            }
            "mlp_lr" => self.mlp.learning_rate = parse_positive(key, value)?,
            "mlp_dropout" => {
                let p: f64 = parse(key, value)?;
                if !(0.0..1.0).contains(&p) {
                    return Err(PipelineError::Config(format!("`{key}` must be in [0, 1)")));
                }
                self.mlp.dropout = p;
            }
            "mlp_epochs" => self.mlp.epochs = parse_count(key, value)?,
            "mlp_batch" => self.mlp.batch_size = parse_count(key, value)?,
            _ => return Err(PipelineError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Cross-key checks.
    pub fn validate(&self) -> Result<()> {
        if self.median_win1_ms >= self.median_win2_ms {
            return Err(PipelineError::Config("median_win1_ms must be smaller than median_win2_ms".into()));
        }
        if self.folds < 2 {
            return Err(PipelineError::Config("folds must be at least 2".into()));
        }
        if self.max_dim > 3 {
            return Err(PipelineError::Config("max_dim above 3 is not supported".into()));
        }
        Ok(())
    }

    pub fn model_specs(&self) -> Result<Vec<ModelSpec>> {
        self.models
            .iter()
            .map(|name| {
                Ok(match ModelSpec::by_name(name)? {
                    ModelSpec::RandomForest(_) => ModelSpec::RandomForest(self.forest.clone()),
                    ModelSpec::DecisionTree(_) => ModelSpec::DecisionTree(self.tree.clone()),
                    ModelSpec::LogisticRegression(_) => ModelSpec::LogisticRegression(self.logistic.clone()),
                    ModelSpec::Mlp(_) => ModelSpec::Mlp(self.mlp.clone()),
                })
            })
            .collect()
    }

    /// Every setting as text, in key order.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let threshold = match self.threshold {
            ThresholdRule::Universal => "universal".to_string(),
            ThresholdRule::Fixed(t) => t.to_string(),
        };
        let mut m: BTreeMap<String, String> = [
            ("baseline", self.baseline.to_string()),
            ("median_win1_ms", self.median_win1_ms.to_string()),
            ("median_win2_ms", self.median_win2_ms.to_string()),
            ("denoise", self.denoise.to_string()),
            ("wavelet", self.wavelet.as_str().to_string()),
            ("dwt_level", self.dwt_level.to_string()),
            ("threshold", threshold),
            ("trial_s", self.trial_s.to_string()),
            ("unit", if self.unit == Unit::Subject { "subject" } else { "segment" }.to_string()),
            ("segment_trials", self.segment_trials.to_string()),
            ("center_rows", self.center_rows.to_string()),
            ("embed_dim", self.embed_dim.to_string()),
            ("complex_kind", self.complex_kind.as_str().to_string()),
            ("epsilon_max", self.epsilon_max.map_or("auto".to_string(), |e| e.to_string())),
            ("max_dim", self.max_dim.to_string()),
            ("verify_tol", self.verify_tol.to_string()),
            ("min_persistence", self.min_persistence.to_string()),
            ("task", self.task.as_str().to_string()),
            ("models", self.models.join(",")),
            ("folds", self.folds.to_string()),
            ("seed", self.seed.to_string()),
            ("rf_trees", self.forest.trees.to_string()),
            ("rf_max_depth", self.forest.max_depth.to_string()),
            ("rf_min_split", self.forest.min_samples_split.to_string()),
            ("rf_min_leaf", self.forest.min_samples_leaf.to_string()),
            ("dt_max_depth", self.tree.max_depth.to_string()),
            ("dt_min_split", self.tree.min_samples_split.to_string()),
            ("dt_min_leaf", self.tree.min_samples_leaf.to_string()),
            ("lr_c", self.logistic.c.to_string()),
            ("lr_max_iter", self.logistic.max_iter.to_string()),
            ("lr_tol", self.logistic.tol.to_string()),
            ("mlp_layers", self.mlp.hidden.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
            ("mlp_lr", self.mlp.learning_rate.to_string()),
            ("mlp_dropout", self.mlp.dropout.to_string()),
            ("mlp_epochs", self.mlp.epochs.to_string()),
            ("mlp_batch", self.mlp.batch_size.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        for (name, label) in &self.label_overrides {
            m.insert(format!("label.{name}"), label.as_str().to_string());
        }
        m
    }

    /// The settings that shape a persistence diagram; subjects are only
    /// comparable when these agree.
    pub fn diagram_provenance(&self) -> String {
        const KEYS: [&str; 17] = [
            "baseline",
            "median_win1_ms",
            "median_win2_ms",
            "denoise",
            "wavelet",
            "dwt_level",
            "threshold",
            "trial_s",
            "unit",
            "segment_trials",
            "center_rows",
            "embed_dim",
            "complex_kind",
            "epsilon_max",
            "max_dim",
            "min_persistence",
            "verify_tol",
        ];
        let snap = self.snapshot();
        KEYS.iter().map(|k| format!("{k}={}", snap[*k])).collect::<Vec<_>>().join(";")
    }
}
