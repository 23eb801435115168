use alloc::format;
use alloc::vec::Vec;

use super::EcgRecord;
use crate::num::round;
use crate::{Error, Result};

/// Odd window length in samples for a duration in milliseconds.
pub fn window_samples(window_ms: f64, sampling_rate_hz: f64) -> usize {
    let w = round(window_ms * sampling_rate_hz / 1000.0).max(1.0) as usize;
    w | 1
}

/// Point-symmetric extension about the edge samples, so linear trends
/// continue through the boundary unchanged.
fn extended(signal: &[f64], i: isize) -> f64 {
    let n = signal.len() as isize;
    if i < 0 {
        2.0 * signal[0] - signal[(-i) as usize]
    } else if i >= n {
        2.0 * signal[(n - 1) as usize] - signal[(2 * (n - 1) - i) as usize]
    } else {
        signal[i as usize]
    }
}

fn insert_sorted(window: &mut Vec<f64>, v: f64) {
    let at = window.partition_point(|x| x.total_cmp(&v).is_lt());
    window.insert(at, v);
}

fn remove_sorted(window: &mut Vec<f64>, v: f64) {
    let at = window.partition_point(|x| x.total_cmp(&v).is_lt());
    window.remove(at);
}

/// Running median with an odd window of `window` samples.
///
/// Runs in O(N·w) worst case using a sorted sliding buffer.
pub fn median_filter(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Parameter(format!("median window must be odd and positive, got {window}")));
    }
    if window > signal.len() {
        return Err(Error::Parameter(format!(
            "median window of {window} samples exceeds signal length {}",
            signal.len()
        )));
    }
    let half = (window / 2) as isize;
    let mut buf: Vec<f64> = (-half..=half).map(|i| extended(signal, i)).collect();
    buf.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(signal.len());
    for i in 0..signal.len() as isize {
        out.push(buf[half as usize]);
        if i + 1 < signal.len() as isize {
            remove_sorted(&mut buf, extended(signal, i - half));
            insert_sorted(&mut buf, extended(signal, i + half + 1));
        }
    }
    Ok(out)
}

/// Two-stage median baseline estimate subtracted from every channel.
pub fn median_baseline_removal(record: &EcgRecord, win1_ms: f64, win2_ms: f64) -> Result<EcgRecord> {
    record.validate()?;
    if !(win1_ms > 0.0 && win1_ms < win2_ms) {
        return Err(Error::Parameter(format!(
            "median windows must satisfy 0 < win1 < win2, got {win1_ms} ms and {win2_ms} ms"
        )));
    }
    let w1 = window_samples(win1_ms, record.sampling_rate_hz);
    let w2 = window_samples(win2_ms, record.sampling_rate_hz);
    let channels = record
        .channels
        .iter()
        .map(|signal| {
            let baseline = median_filter(&median_filter(signal, w1)?, w2)?;
            Ok(signal.iter().zip(&baseline).map(|(s, b)| s - b).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(record.with_channels(channels))
}
