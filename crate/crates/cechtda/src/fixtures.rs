//! Seeded synthetic data with known topology.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use cechtda_core::embedding::PointCloud;
use cechtda_core::ingest::{EcgRecord, Label};

/// Class A (`Nsr`): `points` samples near a unit circle in a random plane of
/// R³. Class B (`Mci`): an isotropic Gaussian blob of similar spread.
/// Coordinates are rounded to 1e-6. Subjects alternate A, B, A, ...
pub fn circle_and_blob_clouds(per_class: usize, points: usize, noise: f64, seed: u64) -> Vec<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, 1.0).unwrap();
    let mut out = Vec::with_capacity(2 * per_class);
    for i in 0..2 * per_class {
        let circle = i % 2 == 0;
        let coords: Vec<Vec<f64>> = if circle {
            // orthonormal pair spanning a random plane
            let a = unit(&mut rng, &gauss);
            let mut b = unit(&mut rng, &gauss);
            let proj: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            b.iter_mut().zip(&a).for_each(|(bi, ai)| *bi -= proj * ai);
            let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            b.iter_mut().for_each(|v| *v /= nb);
            (0..points)
                .map(|_| {
                    let th = rng.random_range(0.0..TAU);
                    (0..3).map(|k| th.cos() * a[k] + th.sin() * b[k] + noise * gauss.sample(&mut rng)).collect()
                })
                .collect()
        } else {
            (0..points).map(|_| (0..3).map(|_| 0.7 * gauss.sample(&mut rng)).collect()).collect()
        };
        let coords: Vec<Vec<f64>> = coords.into_iter().map(|p| p.into_iter().map(|v| (v * 1e6).round() / 1e6).collect()).collect();
        let label = if circle { Label::Nsr } else { Label::Mci };
        out.push(PointCloud::from_points(&coords, format!("syn{i:02}")).unwrap().with_label(label));
    }
    out
}

fn unit(rng: &mut ChaCha8Rng, gauss: &Normal<f64>) -> [f64; 3] {
    loop {
        let v = [gauss.sample(rng), gauss.sample(rng), gauss.sample(rng)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// A beat: narrow QRS spike plus a broad T wave, as a function of time since
/// the R peak.
fn beat(dt: f64, amplitude: f64) -> f64 {
    let qrs = amplitude * (-(dt / 0.025).powi(2)).exp();
    let t_wave = 0.3 * amplitude * (-((dt - 0.25) / 0.06).powi(2)).exp();
    qrs + t_wave
}

/// Two-lead synthetic ECG with baseline wander and noise, quantized to
/// 1e-4 mV.
///
/// `Nsr` beats at a fixed 0.9 s period, so consecutive 4 s trials are phase
/// shifted copies of one waveform and their embedding traces a loop. `Mci`
/// beats at random intervals and amplitudes, which scatters the trials.
pub fn synthetic_ecg(subject: &str, label: Label, fs: f64, duration_s: f64, seed: u64) -> EcgRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let n = (fs * duration_s).round() as usize;
    let mut peaks = Vec::new();
    let mut amps = Vec::new();
    let mut t = rng.random_range(0.0..0.9);
    while t < duration_s + 1.0 {
        peaks.push(t);
        match label {
            Label::Nsr => {
                amps.push(1.0);
                t += 0.9;
            }
            _ => {
                amps.push(rng.random_range(0.5..1.5));
                t += rng.random_range(0.35..1.4);
            }
        }
    }
    let drift_phase = rng.random_range(0.0..TAU);
    let gains = [1.0, 0.6];
    let channels = gains
        .iter()
        .map(|g| {
            (0..n)
                .map(|i| {
                    let ti = i as f64 / fs;
                    let s: f64 = peaks.iter().zip(&amps).map(|(p, a)| beat(ti - p, *a)).sum();
                    let v = g * s + 0.3 * (TAU * 0.1 * ti + drift_phase).sin() + noise.sample(&mut rng);
                    (v * 1e4).round() / 1e4
                })
                .collect()
        })
        .collect();
    EcgRecord::new(subject, label, fs, vec!["I".into(), "II".into()], channels).unwrap()
}

/// The forty clouds shipped under `fixtures/clouds40`.
pub fn clouds40() -> Vec<PointCloud> {
    circle_and_blob_clouds(20, 30, 0.1, 40)
}

/// The six subjects shipped under `fixtures/ecg6`: three of each class,
/// 60 s at 50 Hz.
pub fn ecg6() -> Vec<EcgRecord> {
    (0..6)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Nsr } else { Label::Mci };
            synthetic_ecg(&format!("s{:02}", i + 1), label, 50.0, 60.0, 100 + i as u64)
        })
        .collect()
}
