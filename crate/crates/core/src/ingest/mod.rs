//! Recording model, preprocessing and segmentation into trial matrices.

mod dwt;
mod median;
mod segment;

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dwt::{dwt_denoise, wavedec, waverec, Decomposition, ThresholdRule, Wavelet};
pub use median::{median_baseline_removal, median_filter, window_samples};
pub use segment::{segment_trials, TrialMatrix, TrialProvenance, CHANNEL_MAJOR};

/// Subject class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    /// Normal sinus rhythm.
    Nsr,
    /// Myocardial-infarction related.
    Mci,
    /// Other cardiac anomaly.
    NonMci,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Nsr, Label::Mci, Label::NonMci];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Nsr => "NSR",
            Label::Mci => "MCI",
            Label::NonMci => "NONMCI",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace(['-', '_'], "").as_str() {
            "NSR" => Ok(Label::Nsr),
            "MCI" => Ok(Label::Mci),
            "NONMCI" => Ok(Label::NonMci),
            other => Err(Error::Parameter(format!("unknown label `{other}`"))),
        }
    }
}

/// A multi-channel ECG recording in millivolts.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub channels: Vec<Vec<f64>>,
    pub sampling_rate_hz: f64,
    pub channel_names: Vec<String>,
    pub label: Label,
    pub subject_id: String,
}

impl EcgRecord {
    /// Builds a record, checking the shape invariants.
    pub fn new(
        subject_id: impl Into<String>,
        label: Label,
        sampling_rate_hz: f64,
        channel_names: Vec<String>,
        channels: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let record = EcgRecord {
            channels,
            sampling_rate_hz,
            channel_names,
            label,
            subject_id: subject_id.into(),
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate_hz > 0.0) || !self.sampling_rate_hz.is_finite() {
            return Err(Error::Input(format!(
                "sampling rate must be positive, got {}",
                self.sampling_rate_hz
            )));
        }
        if self.channels.is_empty() {
            return Err(Error::Input("record has no channels".to_owned()));
        }
        if self.channel_names.len() != self.channels.len() {
            return Err(Error::Input(format!(
                "{} channel names for {} channels",
                self.channel_names.len(),
                self.channels.len()
            )));
        }
        let len = self.channels[0].len();
        if len == 0 {
            return Err(Error::Input("channels are empty".to_owned()));
        }
        if let Some((i, c)) = self.channels.iter().enumerate().find(|(_, c)| c.len() != len) {
            return Err(Error::Input(format!(
                "ragged channels: channel {i} has {} samples, channel 0 has {len}",
                c.len()
            )));
        }
        Ok(())
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn sample_count(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn duration_s(&self) -> f64 {
        self.sample_count() as f64 / self.sampling_rate_hz
    }

    /// Same metadata, new channel data.
    pub(crate) fn with_channels(&self, channels: Vec<Vec<f64>>) -> EcgRecord {
        EcgRecord {
            channels,
            sampling_rate_hz: self.sampling_rate_hz,
            channel_names: self.channel_names.clone(),
            label: self.label,
            subject_id: self.subject_id.clone(),
        }
    }
}

/// Maps rhythm annotations (names or MIT-BIH rhythm codes) onto subject classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMap {
    entries: Vec<(String, Label)>,
}

impl Default for LabelMap {
    fn default() -> Self {
        let mut map = LabelMap { entries: Vec::new() };
        for (names, label) in [
            (&["ventricular fibrillation", "VF", "VFL"][..], Label::Mci),
            (&["ventricular tachycardia", "VT"][..], Label::Mci),
            (&["atrial fibrillation", "AFIB"][..], Label::Mci),
            (&["sinus bradycardia", "SBR"][..], Label::Mci),
            (&["atrial flutter", "AFL"][..], Label::NonMci),
            (&["supraventricular tachycardia", "SVTA", "SVT"][..], Label::NonMci),
            (&["bigeminy", "B"][..], Label::NonMci),
            (&["trigeminy", "T"][..], Label::NonMci),
            (&["normal sinus rhythm", "N", "NSR"][..], Label::Nsr),
        ] {
            for name in names {
                map.insert(name, label);
            }
        }
        map
    }
}

impl LabelMap {
    pub fn empty() -> Self {
        LabelMap { entries: Vec::new() }
    }

    fn key(name: &str) -> String {
        name.trim().trim_start_matches('(').to_ascii_lowercase()
    }

    /// Adds or replaces a mapping.
    pub fn insert(&mut self, name: &str, label: Label) {
        let key = Self::key(name);
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = label,
            None => self.entries.push((key, label)),
        }
    }

    /// Case-insensitive lookup; a leading `(` as in MIT-BIH aux notes is ignored.
    pub fn lookup(&self, annotation: &str) -> Option<Label> {
        let key = Self::key(annotation);
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, l)| *l)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
