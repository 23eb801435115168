use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{EcgRecord, Label};
use crate::num::round;
use crate::{Error, Result};

/// Layout tag: each trial row holds channel 0's window, then channel 1's, ...
pub const CHANNEL_MAJOR: &str = "channel-major";

/// Where a trial matrix came from and how it was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialProvenance {
    pub subject_id: String,
    pub label: Label,
    pub sampling_rate_hz: f64,
    pub channels: usize,
    pub layout: String,
    /// Free-form description of the preprocessing applied before segmentation.
    pub preprocessing: String,
}

/// `n` trials by `t` samples, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMatrix {
    pub data: Vec<f64>,
    pub n: usize,
    pub t: usize,
    pub trial_duration_s: f64,
    pub provenance: TrialProvenance,
}

impl TrialMatrix {
    pub fn new(data: Vec<f64>, n: usize, t: usize, trial_duration_s: f64, provenance: TrialProvenance) -> Result<Self> {
        if n == 0 || t == 0 || data.len() != n * t {
            return Err(Error::Input(format!(
                "trial matrix needs n, t >= 1 and n*t values; got n={n}, t={t}, {} values",
                data.len()
            )));
        }
        Ok(TrialMatrix { data, n, t, trial_duration_s, provenance })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.t..(i + 1) * self.t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.t)
    }

    /// Subtracts each row's mean.
    pub fn center_rows(&mut self) {
        let t = self.t;
        for row in self.data.chunks_exact_mut(t) {
            let m = row.iter().sum::<f64>() / t as f64;
            row.iter_mut().for_each(|v| *v -= m);
        }
    }

    /// Splits the trials into consecutive blocks of `size` rows named
    /// `<subject>_segNN`; a short tail is dropped.
    pub fn split_rows(&self, size: usize) -> Vec<TrialMatrix> {
        if size == 0 {
            return Vec::new();
        }
        self.data
            .chunks_exact(size * self.t)
            .enumerate()
            .map(|(k, block)| {
                let mut provenance = self.provenance.clone();
                provenance.subject_id = format!("{}_seg{k:02}", self.provenance.subject_id);
                TrialMatrix {
                    data: block.to_vec(),
                    n: size,
                    t: self.t,
                    trial_duration_s: self.trial_duration_s,
                    provenance,
                }
            })
            .collect()
    }
}

/// Cuts every channel into non-overlapping windows of `trial_s` seconds and
/// concatenates the channels of each window into one row.
pub fn segment_trials(record: &EcgRecord, trial_s: f64, preprocessing: &str) -> Result<TrialMatrix> {
    record.validate()?;
    let window = round(trial_s * record.sampling_rate_hz);
    if !(window >= 1.0) || !window.is_finite() {
        return Err(Error::Parameter(format!(
            "trial of {trial_s} s at {} Hz is shorter than one sample",
            record.sampling_rate_hz
        )));
    }
    let window = window as usize;
    let samples = record.sample_count();
    let n = samples / window;
    if n == 0 {
        return Err(Error::Empty(format!(
            "record `{}` has {samples} samples, fewer than one {trial_s} s trial ({window} samples)",
            record.subject_id
        )));
    }
    let ch = record.channel_count();
    let t = ch * window;
    let mut data = Vec::with_capacity(n * t);
    for k in 0..n {
        for channel in &record.channels {
            data.extend_from_slice(&channel[k * window..(k + 1) * window]);
        }
    }
    TrialMatrix::new(
        data,
        n,
        t,
        trial_s,
        TrialProvenance {
            subject_id: record.subject_id.clone(),
            label: record.label,
            sampling_rate_hz: record.sampling_rate_hz,
            channels: ch,
            layout: String::from(CHANNEL_MAJOR),
            preprocessing: String::from(preprocessing),
        },
    )
}
