//! The seven stages. Each reads the previous stage's files under the output
//! directory, processes subjects in parallel and writes its own files
//! atomically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use cechtda_core::complex::{build_cech_filtration, build_rips_filtration, default_epsilon_max, verify_homotopy_equivalence, FiltrationKind};
use cechtda_core::embedding::{decompose, project_point_cloud};
use cechtda_core::ingest::{dwt_denoise, median_baseline_removal, segment_trials, Label, ThresholdRule};
use cechtda_core::ml::{assemble_features, cross_validate, feature_names, stratified_folds, EvalReport, SubjectDiagram, Task};
use cechtda_core::persistence::{aggregate_entropies, betti_curve, compute_persistence, persistent_entropy, prune_transient, uniform_grid, FEATURE_DIMS};
use cechtda_core::Error;

use crate::config::{PipelineConfig, Unit};
use crate::error::{PipelineError, Result};
use crate::io::{self, DiagramHeader, RecordFormat};
use crate::manifest::{checksum_file, RunManifest};
use crate::plot;
use crate::stats::{paired_t_test, TTest};

pub const SUBJECTS: &str = "subjects.csv";
pub const FEATURES: &str = "features.csv";
pub const REPORT: &str = "report.json";
pub const SUMMARY: &str = "report_summary.csv";
const BETTI_POINTS: usize = 64;

pub struct Context {
    pub cfg: PipelineConfig,
    pub out: PathBuf,
    pool: rayon::ThreadPool,
}

impl Context {
    /// `jobs = 0` uses every core.
    pub fn new(cfg: PipelineConfig, out: impl Into<PathBuf>, jobs: usize) -> Result<Context> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
        Ok(Context { cfg, out: out.into(), pool })
    }

    fn path(&self, parts: &[&str]) -> PathBuf {
        parts.iter().fold(self.out.clone(), |p, s| p.join(s))
    }

    /// Runs `f` on every subject in parallel, keeping subject order.
    fn per_subject<T: Send>(&self, subjects: &[(String, Label)], f: impl Fn(&str, Label) -> Result<T> + Sync) -> Result<Vec<T>> {
        self.pool.install(|| subjects.par_iter().map(|(id, label)| f(id, *label)).collect())
    }

    fn upstream(&self, stage: &'static str, parts: &[&str]) -> Result<PathBuf> {
        let p = self.path(parts);
        if p.exists() {
            Ok(p)
        } else {
            Err(PipelineError::Dependency { stage, artifact: p })
        }
    }

    fn subjects(&self) -> Result<Vec<(String, Label)>> {
        io::read_subjects(&self.upstream("ingest", &[SUBJECTS])?)
    }

    fn finish(&self, stage: &str, started: Instant, outputs: &[PathBuf], inputs: Option<Vec<crate::manifest::InputFile>>) -> Result<()> {
        let mut m = RunManifest::load_or_default(&self.out)?;
        m.version = env!("CARGO_PKG_VERSION").to_string();
        m.seed = self.cfg.seed;
        m.config = self.cfg.snapshot();
        if let Some(inputs) = inputs {
            m.inputs = inputs;
        }
        m.record(stage, &self.out, outputs, started.elapsed().as_secs_f64());
        m.save(&self.out)
    }
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    io::atomic_write(&path, bytes)?;
    Ok(path)
}

fn preprocessing_tag(cfg: &PipelineConfig) -> String {
    let mut s = String::new();
    if cfg.baseline {
        let _ = write!(s, "median({}ms,{}ms);", cfg.median_win1_ms, cfg.median_win2_ms);
    }
    if cfg.denoise {
        let rule = match cfg.threshold {
            ThresholdRule::Universal => "universal".to_string(),
            ThresholdRule::Fixed(t) => format!("fixed {t}"),
        };
        let _ = write!(s, "dwt({},level {},{rule});", cfg.wavelet.as_str(), cfg.dwt_level);
    }
    if s.is_empty() {
        s.push_str("none");
    }
    s
}

/// Loads, cleans and segments records into `trials/<id>.trm` and writes the
/// `subjects.csv` index.
pub fn ingest(ctx: &Context, inputs: &[PathBuf], format: Option<RecordFormat>, label_table: Option<&Path>) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let cfg = &ctx.cfg;
    if inputs.is_empty() {
        return Err(PipelineError::Config("ingest needs at least one input file".into()));
    }
    let binary_labels = match label_table {
        Some(p) => io::parse_label_table(p, &cfg.labels)?,
        None => BTreeMap::new(),
    };
    let tag = preprocessing_tag(cfg);
    let matrices = ctx.pool.install(|| {
        inputs
            .par_iter()
            .map(|path| {
                let fmt = format.unwrap_or_else(|| RecordFormat::from_path(path));
                let mut record = io::load_record(path, fmt, &cfg.labels, &binary_labels)?;
                let id = record.subject_id.clone();
                let wrap = PipelineError::subject;
                if cfg.baseline {
                    record = median_baseline_removal(&record, cfg.median_win1_ms, cfg.median_win2_ms).map_err(wrap(&id))?;
                }
                if cfg.denoise {
                    record = dwt_denoise(&record, cfg.wavelet, cfg.dwt_level, cfg.threshold).map_err(wrap(&id))?;
                }
                let m = segment_trials(&record, cfg.trial_s, &tag).map_err(wrap(&id))?;
                Ok(match cfg.unit {
                    Unit::Subject => vec![m],
                    Unit::Segment => {
                        let parts = m.split_rows(cfg.segment_trials);
                        if parts.is_empty() {
                            return Err(PipelineError::Subject {
                                subject: id,
                                source: Error::Empty(format!("{} trials, fewer than segment_trials = {}", m.n, cfg.segment_trials)),
                            });
                        }
                        parts
                    }
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut index = Vec::new();
    let mut outputs = Vec::new();
    for m in matrices.into_iter().flatten() {
        let id = m.provenance.subject_id.clone();
        if index.iter().any(|(i, _)| *i == id) {
            return Err(PipelineError::Config(format!("subject id `{id}` appears in more than one input")));
        }
        outputs.push(write(ctx.path(&["trials", &format!("{id}.trm")]), &io::trial_matrix_to_bytes(&m))?);
        index.push((id, m.provenance.label));
    }
    index.sort();
    outputs.push(write(ctx.path(&[SUBJECTS]), io::subjects_to_csv(&index).as_bytes())?);
    let checksums = inputs.iter().map(|p| checksum_file(p)).collect::<Result<Vec<_>>>()?;
    ctx.finish("ingest", started, &outputs, Some(checksums))?;
    Ok(outputs)
}

/// Trial matrices to `clouds/<id>.csv`.
pub fn embed(ctx: &Context) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let subjects = ctx.subjects()?;
    let outputs = ctx.per_subject(&subjects, |id, label| {
        let mut m = io::read_trial_matrix(&ctx.upstream("ingest", &["trials", &format!("{id}.trm")])?)?;
        if ctx.cfg.center_rows {
            m.center_rows();
        }
        let dec = decompose(&m).map_err(PipelineError::subject(id))?;
        let cloud = project_point_cloud(&dec, ctx.cfg.embed_dim).map_err(PipelineError::subject(id))?.with_label(label);
        if !cloud.supports_voids() {
            eprintln!("warning: subject {id} has {} points in R^{}; H2 cannot be observed", cloud.n, cloud.d);
        }
        write(ctx.path(&["clouds", &format!("{id}.csv")]), io::point_cloud_to_csv(&cloud).as_bytes())
    })?;
    ctx.finish("embed", started, &outputs, None)?;
    Ok(outputs)
}

/// Per-subject outcome of the nerve check.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexSummary {
    pub subject: String,
    pub kind: &'static str,
    pub simplices: usize,
    pub epsilon_max: f64,
    pub violations: usize,
}

/// Point clouds to `complexes/<id>.filt`, each checked against the nerve
/// condition with the report in `complexes/<id>.verify.json`. Violations fail
/// the stage unless `allow_rips`.
pub fn complex(ctx: &Context, allow_rips: bool) -> Result<Vec<ComplexSummary>> {
    let started = Instant::now();
    let cfg = &ctx.cfg;
    let subjects = ctx.subjects()?;
    let results = ctx.per_subject(&subjects, |id, _| {
        let cloud = io::read_point_cloud(&ctx.upstream("embed", &["clouds", &format!("{id}.csv")])?)?;
        let eps = cfg.epsilon_max.unwrap_or_else(|| default_epsilon_max(&cloud));
        let f = match cfg.complex_kind {
            FiltrationKind::Cech => build_cech_filtration(&cloud, eps, cfg.max_dim),
            FiltrationKind::Rips => build_rips_filtration(&cloud, eps, cfg.max_dim),
        }
        .map_err(PipelineError::subject(id))?;
        let report = verify_homotopy_equivalence(&f, &cloud, cfg.verify_tol).map_err(PipelineError::subject(id))?;
        let filt = write(ctx.path(&["complexes", &format!("{id}.filt")]), io::filtration_to_text(&f, id).as_bytes())?;
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        let ver = write(ctx.path(&["complexes", &format!("{id}.verify.json")]), json.as_bytes())?;
        let summary = ComplexSummary {
            subject: id.to_string(),
            kind: f.kind.as_str(),
            simplices: f.len(),
            epsilon_max: eps,
            violations: report.violations.len(),
        };
        Ok((summary, [filt, ver]))
    })?;
    if !allow_rips {
        if let Some((s, _)) = results.iter().find(|(s, _)| s.violations > 0) {
            return Err(PipelineError::Verification { subject: s.subject.clone(), count: s.violations });
        }
    }
    let outputs: Vec<PathBuf> = results.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
    ctx.finish("complex", started, &outputs, None)?;
    Ok(results.into_iter().map(|(s, _)| s).collect())
}

/// Filtrations to `diagrams/<id>.csv` and `betti/<id>.csv`, plus SVG plots
/// under `plots/` when `plot` is set.
pub fn persist(ctx: &Context, plot: bool) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let subjects = ctx.subjects()?;
    let outputs = ctx.per_subject(&subjects, |id, label| {
        let (_, f) = io::read_filtration(&ctx.upstream("complex", &["complexes", &format!("{id}.filt")])?)?;
        let mut d = compute_persistence(&f).map_err(PipelineError::subject(id))?;
        if ctx.cfg.min_persistence > 0.0 {
            d = prune_transient(&d, ctx.cfg.min_persistence).map_err(PipelineError::subject(id))?;
        }
        // the kind actually built wins over the configured one
        let mut cfg = ctx.cfg.clone();
        cfg.complex_kind = f.kind;
        let header = DiagramHeader { subject: id.to_string(), label, provenance: cfg.diagram_provenance() };
        let mut out = vec![write(ctx.path(&["diagrams", &format!("{id}.csv")]), io::diagram_to_csv(&d, &header).as_bytes())?];
        let grid = uniform_grid(d.epsilon_max, BETTI_POINTS);
        let dims = FEATURE_DIMS.iter().copied().filter(|&k| k < d.pairs.len());
        let curves = dims.map(|k| betti_curve(&d, k, &grid)).collect::<cechtda_core::Result<Vec<_>>>().map_err(PipelineError::subject(id))?;
        out.push(write(ctx.path(&["betti", &format!("{id}.csv")]), io::betti_to_csv(&curves).as_bytes())?);
        if plot {
            let title = format!("{id} ({label})");
            out.push(write(ctx.path(&["plots", &format!("{id}_diagram.svg")]), plot::diagram_svg(&d, &title).as_bytes())?);
            out.push(write(ctx.path(&["plots", &format!("{id}_betti.svg")]), plot::betti_svg(&curves, &title).as_bytes())?);
        }
        Ok(out)
    })?;
    let outputs: Vec<PathBuf> = outputs.into_iter().flatten().collect();
    ctx.finish("persist", started, &outputs, None)?;
    Ok(outputs)
}

fn read_diagrams(ctx: &Context) -> Result<Vec<SubjectDiagram>> {
    let subjects = ctx.subjects()?;
    ctx.per_subject(&subjects, |id, _| {
        let (h, diagram) = io::read_diagram(&ctx.upstream("persist", &["diagrams", &format!("{id}.csv")])?)?;
        Ok(SubjectDiagram { subject_id: h.subject, label: h.label, diagram, provenance: h.provenance })
    })
}

/// Diagrams to the `features.csv` table.
pub fn features(ctx: &Context) -> Result<PathBuf> {
    let started = Instant::now();
    let diagrams = read_diagrams(ctx)?;
    let rows = assemble_features(&diagrams)?;
    let path = write(ctx.path(&[FEATURES]), io::features_to_csv(&feature_names(), &rows).as_bytes())?;
    ctx.finish("features", started, std::slice::from_ref(&path), None)?;
    Ok(path)
}

/// Cross-validates every configured model on one shared fold assignment and
/// writes `report.json` and `report_summary.csv`.
pub fn train(ctx: &Context) -> Result<EvalReport> {
    let started = Instant::now();
    let cfg = &ctx.cfg;
    let (names, rows) = io::read_features(&ctx.upstream("features", &[FEATURES])?)?;
    if names != feature_names() {
        return Err(PipelineError::parse(ctx.path(&[FEATURES]), 1, "feature columns do not match this version"));
    }
    let (data, ids) = cfg.task.dataset(&rows)?;
    let fold_of = stratified_folds(&data.y, data.n_classes, cfg.folds, cfg.seed)?;
    let specs = cfg.model_specs()?;
    let models = ctx.pool.install(|| {
        specs.par_iter().map(|s| cross_validate(&data, s, &fold_of, cfg.folds, cfg.seed)).collect::<cechtda_core::Result<Vec<_>>>()
    })?;
    let report = EvalReport {
        task: cfg.task,
        seed: cfg.seed,
        folds: cfg.folds,
        class_labels: cfg.task.class_labels(),
        sample_ids: ids,
        truth: data.y.clone(),
        fold_assignments: fold_of,
        models,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let a = write(ctx.path(&[REPORT]), json.as_bytes())?;
    let b = write(ctx.path(&[SUMMARY]), summary_csv(&report).as_bytes())?;
    ctx.finish("train", started, &[a, b], None)?;
    Ok(report)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

/// One row per model: accuracy mean and SD in percent, then AUC, F1, kappa.
pub fn summary_csv(r: &EvalReport) -> String {
    let mut s = String::from("task,model,accuracy_pct,accuracy_sd_pct,auc,f1,kappa\n");
    for m in &r.models {
        let _ = writeln!(
            s,
            "{},{},{:.2},{:.2},{},{:.4},{:.4}",
            r.task.as_str(),
            m.model,
            100.0 * m.accuracy_mean,
            100.0 * m.accuracy_sd,
            opt(m.auc),
            m.f1,
            m.kappa
        );
    }
    s
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::NsrVsMci => "NSR vs MCI",
        Task::MciVsNonMci => "MCI vs non-MCI",
        Task::ThreeClass => "three-class",
    }
}

/// Writes `report.md`, the significance table `ttest.csv` (every model
/// against the most accurate one, on fold accuracies) and the per-class
/// entropy table `entropy.csv`.
pub fn report(ctx: &Context) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let report_path = ctx.upstream("train", &[REPORT])?;
    let report: EvalReport =
        serde_json::from_str(&io::read_text(&report_path)?).map_err(|e| PipelineError::parse(&report_path, e.line(), e.to_string()))?;
    let diagrams = read_diagrams(ctx)?;

    let mut md = format!("# Classification report: {}\n\n", task_name(report.task));
    let _ = writeln!(md, "{} samples, {} stratified folds, seed {}.\n", report.truth.len(), report.folds, report.seed);
    md.push_str("| model | accuracy (%) | AUC | F1 | kappa |\n|---|---|---|---|---|\n");
    for m in &report.models {
        let _ = writeln!(
            md,
            "| {} | {:.2} ± {:.2} | {} | {:.3} | {:.3} |",
            m.model,
            100.0 * m.accuracy_mean,
            100.0 * m.accuracy_sd,
            opt(m.auc),
            m.f1,
            m.kappa
        );
    }

    let mut tt = String::from("model,reference,t,p,df\n");
    if let Some(best) = report.models.iter().max_by(|a, b| a.accuracy_mean.total_cmp(&b.accuracy_mean)) {
        md.push_str("\n## Paired t-test on fold accuracies\n\n");
        for m in report.models.iter().filter(|m| m.model != best.model) {
            match paired_t_test(&best.fold_accuracies, &m.fold_accuracies) {
                Ok(TTest { t, p, df }) => {
                    let _ = writeln!(tt, "{},{},{t:.6},{p:.6},{df}", m.model, best.model);
                    let _ = writeln!(md, "- {} vs {}: t = {t:.3}, p = {p:.4}", best.model, m.model);
                }
                Err(e) => {
                    let _ = writeln!(tt, "{},{},NA,NA,NA", m.model, best.model);
                    let _ = writeln!(md, "- {} vs {}: undefined ({e})", best.model, m.model);
                }
            }
        }
    }

    let mut samples = Vec::new();
    for d in &diagrams {
        for k in FEATURE_DIMS {
            match persistent_entropy(&d.diagram, k, d.diagram.epsilon_max) {
                Ok(e) => samples.push((d.label, k, e)),
                Err(Error::UndefinedEntropy { .. }) => {}
                Err(e) => return Err(PipelineError::subject(&d.subject_id)(e)),
            }
        }
    }
    let summary = aggregate_entropies(&samples);
    let mut ent = String::from("label,dim,count,mean,variance\n");
    md.push_str("\n## Persistent entropy by class\n\n| class | dim | n | mean | variance |\n|---|---|---|---|---|\n");
    for r in &summary.rows {
        let _ = writeln!(ent, "{},{},{},{},{}", r.label, r.dim, r.count, r.mean, r.variance);
        let _ = writeln!(md, "| {} | H{} | {} | {:.4} | {:.4} |", r.label, r.dim, r.count, r.mean, r.variance);
    }

    let outputs = vec![
        write(ctx.path(&["report.md"]), md.as_bytes())?,
        write(ctx.path(&["ttest.csv"]), tt.as_bytes())?,
        write(ctx.path(&["entropy.csv"]), ent.as_bytes())?,
    ];
    ctx.finish("report", started, &outputs, None)?;
    Ok(outputs)
}
