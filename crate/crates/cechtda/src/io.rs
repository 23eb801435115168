//! On-disk formats for every pipeline artifact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use cechtda_core::complex::{Filtration, FiltrationKind, Simplex};
use cechtda_core::embedding::PointCloud;
use cechtda_core::ingest::{EcgRecord, Label, LabelMap, TrialMatrix, TrialProvenance};
use cechtda_core::ml::FeatureVector;
use cechtda_core::persistence::{BettiCurve, PersistenceDiagram, PersistencePair};

use crate::error::{PipelineError, Result};

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        PipelineError::io(path, e)
    })
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

/// `key=value` tokens of a `# ...` header line.
fn header_fields(path: &Path, line_no: usize, line: Option<&str>) -> Result<BTreeMap<String, String>> {
    let line = line.ok_or_else(|| PipelineError::parse(path, line_no, "file is empty"))?;
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| PipelineError::parse(path, line_no, "expected a `# key=value ...` header"))?;
    body.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| PipelineError::parse(path, line_no, format!("header token `{tok}` is not key=value")))
        })
        .collect()
}

fn field<'a>(path: &Path, line: usize, fields: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| PipelineError::parse(path, line, format!("header lacks `{key}=`")))
}

fn number<T: std::str::FromStr>(path: &Path, line: usize, what: &str, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| PipelineError::parse(path, line, format!("{what}: cannot parse `{}`", text.trim())))
}

fn check_id(path: &Path, id: &str) -> Result<()> {
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) || id.starts_with('.') {
        return Err(PipelineError::parse(path, 1, format!("subject id `{id}` must be non-empty [A-Za-z0-9_.-]")));
    }
    Ok(())
}

fn parse_label(path: &Path, line: usize, text: &str, labels: &LabelMap) -> Result<Label> {
    text.parse::<Label>()
        .ok()
        .or_else(|| labels.lookup(text))
        .ok_or_else(|| PipelineError::parse(path, line, format!("unknown label `{text}`")))
}

/// Input record encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Binary16,
}

impl RecordFormat {
    /// `.csv` is text, anything else is binary16.
    pub fn from_path(path: &Path) -> RecordFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => RecordFormat::Csv,
            _ => RecordFormat::Binary16,
        }
    }
}

/// Loads a record. Binary files carry no label, so their subject id is the
/// file stem and the label comes from `binary_labels`.
pub fn load_record(path: &Path, format: RecordFormat, labels: &LabelMap, binary_labels: &BTreeMap<String, Label>) -> Result<EcgRecord> {
    match format {
        RecordFormat::Csv => parse_record_csv(path, &read_text(path)?, labels),
        RecordFormat::Binary16 => {
            let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
            let subject = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            check_id(path, &subject)?;
            let label = *binary_labels
                .get(&subject)
                .ok_or_else(|| PipelineError::parse(path, 0, format!("no label given for binary record `{subject}`")))?;
            parse_record_binary16(path, &bytes, &subject, label)
        }
    }
}

pub fn parse_record_csv(path: &Path, text: &str, labels: &LabelMap) -> Result<EcgRecord> {
    let mut lines = text.lines();
    let header = header_fields(path, 1, lines.next())?;
    let fs_hz: f64 = number(path, 1, "fs", field(path, 1, &header, "fs")?)?;
    if !(fs_hz > 0.0 && fs_hz.is_finite()) {
        return Err(PipelineError::parse(path, 1, format!("sampling rate must be positive, got {fs_hz}")));
    }
    let label = parse_label(path, 1, field(path, 1, &header, "label")?, labels)?;
    let subject = field(path, 1, &header, "subject")?.to_string();
    check_id(path, &subject)?;
    let names: Vec<String> = lines
        .next()
        .ok_or_else(|| PipelineError::parse(path, 2, "missing channel-name line"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if names.iter().any(String::is_empty) {
        return Err(PipelineError::parse(path, 2, "empty channel name"));
    }
    let mut channels = vec![Vec::new(); names.len()];
    for (i, line) in lines.enumerate() {
        let line_no = i + 3;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != names.len() {
            return Err(PipelineError::parse(
                path,
                line_no,
                format!("ragged row: {} values for {} channels", cells.len(), names.len()),
            ));
        }
        for (ch, cell) in channels.iter_mut().zip(cells) {
            let v: f64 = number(path, line_no, "sample", cell)?;
            if !v.is_finite() {
                return Err(PipelineError::parse(path, line_no, "non-finite sample"));
            }
            ch.push(v);
        }
    }
    if channels[0].is_empty() {
        return Err(PipelineError::parse(path, 3, "record has no samples"));
    }
    EcgRecord::new(subject, label, fs_hz, names, channels).map_err(|e| PipelineError::parse(path, 0, e.to_string()))
}

pub fn record_to_csv(r: &EcgRecord) -> String {
    let mut s = format!("# fs={} label={} subject={}\n{}\n", r.sampling_rate_hz, r.label, r.subject_id, r.channel_names.join(","));
    for i in 0..r.sample_count() {
        let row: Vec<String> = r.channels.iter().map(|c| c[i].to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

const ECG_MAGIC: &[u8; 4] = b"ECG1";
const ECG_HEADER: usize = 20;

/// Header `ECG1`, u32 channel count, u32 samples per channel, f32 sampling
/// rate, f32 gain (mV per count), then channel-major i16 samples, all
/// little-endian.
pub fn parse_record_binary16(path: &Path, bytes: &[u8], subject: &str, label: Label) -> Result<EcgRecord> {
    if bytes.len() < ECG_HEADER {
        return Err(PipelineError::parse(path, 0, format!("file has {} bytes, header needs {ECG_HEADER}", bytes.len())));
    }
    if &bytes[..4] != ECG_MAGIC {
        return Err(PipelineError::parse(path, 0, "bad magic, expected ECG1"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f32_at = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let (ch, s) = (u32_at(4) as usize, u32_at(8) as usize);
    let (fs_hz, gain) = (f64::from(f32_at(12)), f64::from(f32_at(16)));
    if ch == 0 || s == 0 {
        return Err(PipelineError::parse(path, 4, "channel and sample counts must be at least 1"));
    }
    if !(fs_hz > 0.0 && fs_hz.is_finite()) {
        return Err(PipelineError::parse(path, 12, format!("sampling rate must be positive, got {fs_hz}")));
    }
    if !(gain.is_finite() && gain != 0.0) {
        return Err(PipelineError::parse(path, 16, format!("gain must be finite and non-zero, got {gain}")));
    }
    let expected = ch.checked_mul(s).and_then(|n| n.checked_mul(2)).map(|n| n + ECG_HEADER);
    if expected != Some(bytes.len()) {
        return Err(PipelineError::parse(path, ECG_HEADER, format!("{ch}×{s} samples need {expected:?} bytes, file has {}", bytes.len())));
    }
    let samples = &bytes[ECG_HEADER..];
    let channels = (0..ch)
        .map(|c| {
            (0..s)
                .map(|i| {
                    let o = 2 * (c * s + i);
                    f64::from(i16::from_le_bytes([samples[o], samples[o + 1]])) * gain
                })
                .collect()
        })
        .collect();
    let names = (0..ch).map(|c| format!("ch{c}")).collect();
    EcgRecord::new(subject, label, fs_hz, names, channels).map_err(|e| PipelineError::parse(path, 0, e.to_string()))
}

/// Quantizes a record to 16 bits with the given gain.
pub fn record_to_binary16(r: &EcgRecord, gain: f32) -> Vec<u8> {
    let mut out = Vec::with_capacity(ECG_HEADER + 2 * r.channel_count() * r.sample_count());
    out.extend_from_slice(ECG_MAGIC);
    out.extend_from_slice(&(r.channel_count() as u32).to_le_bytes());
    out.extend_from_slice(&(r.sample_count() as u32).to_le_bytes());
    out.extend_from_slice(&(r.sampling_rate_hz as f32).to_le_bytes());
    out.extend_from_slice(&gain.to_le_bytes());
    for c in &r.channels {
        for &v in c {
            let q = (v / f64::from(gain)).round().clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16;
            out.extend_from_slice(&q.to_le_bytes());
        }
    }
    out
}

/// `subject,label` table used to label binary records.
pub fn parse_label_table(path: &Path, labels: &LabelMap) -> Result<BTreeMap<String, Label>> {
    let text = read_text(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.eq_ignore_ascii_case("subject,label")) {
            continue;
        }
        let (id, label) = line.split_once(',').ok_or_else(|| PipelineError::parse(path, i + 1, "expected subject,label"))?;
        out.insert(id.trim().to_string(), parse_label(path, i + 1, label.trim(), labels)?);
    }
    Ok(out)
}

const TRM_MAGIC: &[u8; 4] = b"TRM1";

/// `TRM1`, u64 n, u64 t, f64 trial seconds, u32 length of the provenance
/// JSON, the JSON, then n·t f64 values row-major; little-endian.
pub fn trial_matrix_to_bytes(m: &TrialMatrix) -> Vec<u8> {
    let meta = serde_json::to_vec(&m.provenance).expect("provenance serializes");
    let mut out = Vec::with_capacity(28 + meta.len() + 8 * m.data.len());
    out.extend_from_slice(TRM_MAGIC);
    out.extend_from_slice(&(m.n as u64).to_le_bytes());
    out.extend_from_slice(&(m.t as u64).to_le_bytes());
    out.extend_from_slice(&m.trial_duration_s.to_le_bytes());
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    for v in &m.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_trial_matrix(path: &Path) -> Result<TrialMatrix> {
    let b = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    let bad = |off: usize, msg: &str| PipelineError::parse(path, off, msg.to_string());
    if b.len() < 28 || &b[..4] != TRM_MAGIC {
        return Err(bad(0, "not a trial matrix (magic TRM1)"));
    }
    let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().unwrap()) as usize;
    let (n, t) = (u64_at(4), u64_at(12));
    let dur = f64::from_le_bytes(b[20..28].try_into().unwrap());
    if b.len() < 32 {
        return Err(bad(28, "truncated header"));
    }
    let meta_len = u32::from_le_bytes(b[28..32].try_into().unwrap()) as usize;
    let data_start = 32 + meta_len;
    if b.len() < data_start || Some(b.len() - data_start) != n.checked_mul(t).and_then(|v| v.checked_mul(8)) {
        return Err(bad(32, "payload length does not match n×t"));
    }
    let provenance: TrialProvenance =
        serde_json::from_slice(&b[32..data_start]).map_err(|e| bad(32, &format!("provenance: {e}")))?;
    let data = b[data_start..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    TrialMatrix::new(data, n, t, dur, provenance).map_err(|e| bad(0, &e.to_string()))
}

/// One point per row after a `# subject=<id> d=<d>` header.
pub fn point_cloud_to_csv(c: &PointCloud) -> String {
    let mut s = format!("# subject={} d={}\n", c.subject_id, c.d);
    for p in c.points() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let header = header_fields(path, 1, lines.next())?;
    let subject = field(path, 1, &header, "subject")?.to_string();
    let d: usize = number(path, 1, "d", field(path, 1, &header, "d")?)?;
    let mut coords = Vec::new();
    let mut n = 0;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line.split(',').map(|c| number(path, i + 2, "coordinate", c)).collect::<Result<_>>()?;
        if row.len() != d {
            return Err(PipelineError::parse(path, i + 2, format!("{} coordinates, header says d={d}", row.len())));
        }
        coords.extend(row);
        n += 1;
    }
    PointCloud::new(coords, n, d, subject).map_err(|e| PipelineError::parse(path, 0, e.to_string()))
}

/// Metadata line, then one simplex per line: `v0 v1 ... ; value`.
pub fn filtration_to_text(f: &Filtration, subject: &str) -> String {
    let mut s = format!(
        "# subject={subject} kind={} points={} max_dim={} epsilon_max={}\n",
        f.kind.as_str(),
        f.point_count,
        f.max_dim,
        f.epsilon_max
    );
    for simplex in &f.simplices {
        let vs: Vec<String> = simplex.vertices.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{} ; {}", vs.join(" "), simplex.value);
    }
    s
}

pub fn read_filtration(path: &Path) -> Result<(String, Filtration)> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let h = header_fields(path, 1, lines.next())?;
    let subject = field(path, 1, &h, "subject")?.to_string();
    let kind: FiltrationKind = field(path, 1, &h, "kind")?.parse().map_err(|e: cechtda_core::Error| PipelineError::parse(path, 1, e.to_string()))?;
    let points: usize = number(path, 1, "points", field(path, 1, &h, "points")?)?;
    let max_dim: usize = number(path, 1, "max_dim", field(path, 1, &h, "max_dim")?)?;
    let eps: f64 = number(path, 1, "epsilon_max", field(path, 1, &h, "epsilon_max")?)?;
    let mut simplices = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (vs, val) = line.split_once(';').ok_or_else(|| PipelineError::parse(path, i + 2, "expected `vertices ; value`"))?;
        let vertices = vs.split_whitespace().map(|v| number(path, i + 2, "vertex", v)).collect::<Result<Vec<usize>>>()?;
        simplices.push(Simplex::new(vertices, number(path, i + 2, "value", val)?));
    }
    let f = Filtration::new(simplices, kind, points, max_dim, eps).map_err(|e| PipelineError::parse(path, 0, e.to_string()))?;
    Ok((subject, f))
}

/// Per-subject diagram metadata carried in the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramHeader {
    pub subject: String,
    pub label: Label,
    pub provenance: String,
}

/// `dim,birth,death` rows, `inf` for essential classes.
pub fn diagram_to_csv(d: &PersistenceDiagram, h: &DiagramHeader) -> String {
    let mut s = format!(
        "# subject={} label={} epsilon_max={} max_dim={} provenance={}\ndim,birth,death\n",
        h.subject,
        h.label,
        d.epsilon_max,
        d.pairs.len().saturating_sub(1),
        h.provenance
    );
    for (k, p) in d.iter() {
        let death = if p.is_infinite() { "inf".to_string() } else { p.death.to_string() };
        let _ = writeln!(s, "{k},{},{death}", p.birth);
    }
    s
}

pub fn read_diagram(path: &Path) -> Result<(DiagramHeader, PersistenceDiagram)> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let h = header_fields(path, 1, lines.next())?;
    let header = DiagramHeader {
        subject: field(path, 1, &h, "subject")?.to_string(),
        label: parse_label(path, 1, field(path, 1, &h, "label")?, &LabelMap::empty())?,
        provenance: field(path, 1, &h, "provenance")?.to_string(),
    };
    let eps: f64 = number(path, 1, "epsilon_max", field(path, 1, &h, "epsilon_max")?)?;
    let max_dim: usize = number(path, 1, "max_dim", field(path, 1, &h, "max_dim")?)?;
    if lines.next().map(str::trim) != Some("dim,birth,death") {
        return Err(PipelineError::parse(path, 2, "expected column line `dim,birth,death`"));
    }
    let mut d = PersistenceDiagram::empty(max_dim, eps);
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(PipelineError::parse(path, i + 3, "expected dim,birth,death"));
        }
        let k: usize = number(path, i + 3, "dim", cells[0])?;
        if k > max_dim {
            return Err(PipelineError::parse(path, i + 3, format!("dimension {k} above max_dim {max_dim}")));
        }
        let birth: f64 = number(path, i + 3, "birth", cells[1])?;
        let death = if cells[2].trim() == "inf" { f64::INFINITY } else { number(path, i + 3, "death", cells[2])? };
        d.pairs[k].push(PersistencePair { birth, death, birth_simplex: 0, death_simplex: None });
    }
    Ok((header, d))
}

/// `epsilon,beta0,beta1,...` with one row per grid scale.
pub fn betti_to_csv(curves: &[BettiCurve]) -> String {
    let mut s = String::from("epsilon");
    for c in curves {
        let _ = write!(s, ",beta{}", c.dim);
    }
    s.push('\n');
    if let Some(first) = curves.first() {
        for (i, e) in first.grid.iter().enumerate() {
            s.push_str(&e.to_string());
            for c in curves {
                let _ = write!(s, ",{}", c.values[i]);
            }
            s.push('\n');
        }
    }
    s
}

/// Header `subject,<feature names...>,label`.
pub fn features_to_csv(names: &[String], rows: &[FeatureVector]) -> String {
    let mut s = format!("subject,{},label\n", names.join(","));
    for r in rows {
        let vals: Vec<String> = r.values.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{},{},{}", r.subject_id, vals.join(","), r.label);
    }
    s
}

pub fn read_features(path: &Path) -> Result<(Vec<String>, Vec<FeatureVector>)> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let head: Vec<String> = lines
        .next()
        .ok_or_else(|| PipelineError::parse(path, 1, "file is empty"))?
        .split(',')
        .map(str::to_string)
        .collect();
    if head.len() < 3 || head[0] != "subject" || head[head.len() - 1] != "label" {
        return Err(PipelineError::parse(path, 1, "header must be subject,<features...>,label"));
    }
    let names = head[1..head.len() - 1].to_vec();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != head.len() {
            return Err(PipelineError::parse(path, i + 2, format!("{} cells, header has {}", cells.len(), head.len())));
        }
        let values = cells[1..cells.len() - 1].iter().map(|c| number(path, i + 2, "feature", c)).collect::<Result<Vec<f64>>>()?;
        let label = parse_label(path, i + 2, cells[cells.len() - 1], &LabelMap::empty())?;
        rows.push(FeatureVector { subject_id: cells[0].to_string(), label, values });
    }
    Ok((names, rows))
}

/// `subject,label` index of the samples produced by ingest. Read back in
/// subject order.
pub fn subjects_to_csv(rows: &[(String, Label)]) -> String {
    let mut s = String::from("subject,label\n");
    for (id, label) in rows {
        let _ = writeln!(s, "{id},{label}");
    }
    s
}

pub fn read_subjects(path: &Path) -> Result<Vec<(String, Label)>> {
    Ok(parse_label_table(path, &LabelMap::empty())?.into_iter().collect())
}
