use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EcgRecord;
use crate::num::{ln, median, sqrt};
use crate::{Error, Result};

// Orthonormal scaling filters (sum = √2, unit energy).
const HAAR: [f64; 2] = [core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2];
const DB2: [f64; 4] = [
    0.482_962_913_144_534_1,
    0.836_516_303_737_807_7,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_34,
];
const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_6,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

/// Orthogonal wavelet family. `Db4` is the 8-tap Daubechies filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wavelet {
    Haar,
    Db2,
    Db4,
}

impl Wavelet {
    pub fn scaling_filter(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
        }
    }

    fn wavelet_filter(self) -> Vec<f64> {
        let h = self.scaling_filter();
        let l = h.len();
        (0..l)
            .map(|n| if n % 2 == 0 { h[l - 1 - n] } else { -h[l - 1 - n] })
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Db4 => "db4",
        }
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "db4" => Ok(Wavelet::Db4),
            other => Err(Error::Parameter(format!("unsupported wavelet `{other}`"))),
        }
    }
}

/// How detail coefficients are thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdRule {
    /// σ·√(2 ln N) with σ = median|d₁| / 0.6745.
    Universal,
    /// A fixed soft threshold; zero gives the identity transform.
    Fixed(f64),
}

/// Multi-level periodized wavelet coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub approx: Vec<f64>,
    /// `details[0]` is the finest level.
    pub details: Vec<Vec<f64>>,
    pub original_len: usize,
}

fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = x.len();
    let half = m / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for k in 0..half {
        let mut sa = 0.0;
        let mut sd = 0.0;
        for n in 0..h.len() {
            let v = x[(2 * k + n) % m];
            sa += h[n] * v;
            sd += g[n] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    (a, d)
}

fn synthesis_step(a: &[f64], d: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let m = 2 * a.len();
    let mut x = vec![0.0; m];
    for k in 0..a.len() {
        for n in 0..h.len() {
            x[(2 * k + n) % m] += h[n] * a[k] + g[n] * d[k];
        }
    }
    x
}

/// Multi-level DWT. The signal is extended symmetrically to a multiple of
/// `2^level` and transformed with periodic boundaries, which is orthogonal.
pub fn wavedec(signal: &[f64], wavelet: Wavelet, level: usize) -> Result<Decomposition> {
    if level == 0 {
        return Err(Error::Parameter("decomposition level must be at least 1".into()));
    }
    let block = 1usize.checked_shl(level as u32).unwrap_or(usize::MAX);
    if block > signal.len() {
        return Err(Error::Parameter(format!(
            "signal of {} samples is too short for level {level} (needs {block})",
            signal.len()
        )));
    }
    let n = signal.len();
    let padded = n.div_ceil(block) * block;
    let mut x: Vec<f64> = signal.to_vec();
    x.extend((0..padded - n).map(|j| signal[n - 1 - j]));

    let h = wavelet.scaling_filter();
    let g = wavelet.wavelet_filter();
    let mut details = Vec::with_capacity(level);
    for _ in 0..level {
        let (a, d) = analysis_step(&x, h, &g);
        details.push(d);
        x = a;
    }
    Ok(Decomposition { approx: x, details, original_len: n })
}

/// Inverse of [`wavedec`], truncated back to the original length.
pub fn waverec(dec: &Decomposition, wavelet: Wavelet) -> Vec<f64> {
    let h = wavelet.scaling_filter();
    let g = wavelet.wavelet_filter();
    let mut x = dec.approx.clone();
    for d in dec.details.iter().rev() {
        x = synthesis_step(&x, d, h, &g);
    }
    x.truncate(dec.original_len);
    x
}

fn soft(v: f64, threshold: f64) -> f64 {
    let m = v.abs() - threshold;
    if m > 0.0 {
        m.copysign(v)
    } else {
        0.0
    }
}

fn denoise_channel(signal: &[f64], wavelet: Wavelet, level: usize, rule: ThresholdRule) -> Result<Vec<f64>> {
    let mut dec = wavedec(signal, wavelet, level)?;
    let threshold = match rule {
        ThresholdRule::Fixed(t) => t,
        ThresholdRule::Universal => {
            let abs: Vec<f64> = dec.details[0].iter().map(|v| v.abs()).collect();
            let sigma = median(&abs) / 0.6745;
            sigma * sqrt(2.0 * ln(signal.len() as f64))
        }
    };
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::Parameter(format!("threshold must be finite and non-negative, got {threshold}")));
    }
    if threshold > 0.0 {
        for d in &mut dec.details {
            for v in d.iter_mut() {
                *v = soft(*v, threshold);
            }
        }
    }
    Ok(waverec(&dec, wavelet))
}

/// Wavelet shrinkage of every channel: decompose, soft-threshold the detail
/// coefficients, reconstruct. Approximation coefficients are kept.
pub fn dwt_denoise(record: &EcgRecord, wavelet: Wavelet, level: usize, rule: ThresholdRule) -> Result<EcgRecord> {
    record.validate()?;
    let channels = record
        .channels
        .iter()
        .map(|c| denoise_channel(c, wavelet, level, rule))
        .collect::<Result<Vec<_>>>()?;
    Ok(record.with_channels(channels))
}
