use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::logistic::softmax_in_place;
use super::scaler::Standardizer;
use super::{Classifier, Dataset};
use crate::num::{ln, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    /// Probability of zeroing a hidden unit during training.
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams { hidden: vec![256, 64, 32], learning_rate: 1e-3, dropout: 0.25, epochs: 200, batch_size: 32, seed: 0 }
    }
}

/// Fully connected ReLU network with a softmax output, trained with Adam on
/// the mean cross-entropy of standardized inputs.
///
/// Parameters live in one flat vector, layer by layer, each layer as its
/// row-major `out × in` weights followed by `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub scaler: Standardizer,
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
    /// Mean training loss per epoch.
    pub loss_history: Vec<f64>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
}

/// He-uniform weights, zero biases.
fn init_params(sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p = Vec::with_capacity(param_count(sizes));
    for w in sizes.windows(2) {
        let limit = sqrt(6.0 / w[0] as f64);
        p.extend((0..w[0] * w[1]).map(|_| rng.random_range(-limit..limit)));
        p.extend(core::iter::repeat_n(0.0, w[1]));
    }
    p
}

fn layer_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for w in sizes.windows(2) {
        off.push(off.last().unwrap() + w[1] * (w[0] + 1));
    }
    off
}

struct Dropout<'a> {
    rate: f64,
    rng: &'a mut ChaCha8Rng,
}

/// Activations of every layer (softmax for the last) and, for hidden layers,
/// the local derivative of each unit's output: 0 when the ReLU is off or the
/// unit was dropped, the inverted-dropout scale otherwise.
struct Pass {
    acts: Vec<Vec<f64>>,
    gates: Vec<Vec<f64>>,
}

fn forward(sizes: &[usize], params: &[f64], x: &[f64], mut dropout: Option<&mut Dropout>) -> Pass {
    let offsets = layer_offsets(sizes);
    let layers = sizes.len() - 1;
    let mut acts = Vec::with_capacity(sizes.len());
    let mut gates = vec![Vec::new()];
    acts.push(x.to_vec());
    for l in 0..layers {
        let (n_in, n_out) = (sizes[l], sizes[l + 1]);
        let w = &params[offsets[l]..offsets[l] + n_in * n_out];
        let b = &params[offsets[l] + n_in * n_out..offsets[l + 1]];
        let input = &acts[l];
        let mut z: Vec<f64> = (0..n_out)
            .map(|o| w[o * n_in..(o + 1) * n_in].iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + b[o])
            .collect();
        if l + 1 == layers {
            softmax_in_place(&mut z);
        } else {
            let mut gate: Vec<f64> = z.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
            if let Some(d) = dropout.as_deref_mut() {
                let keep = 1.0 - d.rate;
                for g in gate.iter_mut() {
                    *g = if d.rng.random::<f64>() < keep { *g / keep } else { 0.0 };
                }
            }
            z.iter_mut().zip(&gate).for_each(|(v, g)| *v *= g);
            gates.push(gate);
        }
        acts.push(z);
    }
    Pass { acts, gates }
}

/// Adds the gradient of `−ln p[y]` for one sample to `grad`; returns that loss.
fn backprop(sizes: &[usize], params: &[f64], pass: &Pass, y: usize, grad: &mut [f64]) -> f64 {
    let acts = &pass.acts;
    let offsets = layer_offsets(sizes);
    let layers = sizes.len() - 1;
    let out = &acts[layers];
    let loss = -ln(out[y].max(f64::MIN_POSITIVE));
    let mut delta: Vec<f64> = out.iter().enumerate().map(|(k, p)| p - if k == y { 1.0 } else { 0.0 }).collect();
    for l in (0..layers).rev() {
        let (n_in, n_out) = (sizes[l], sizes[l + 1]);
        let input = &acts[l];
        let base = offsets[l];
        for o in 0..n_out {
            let d = delta[o];
            if d == 0.0 {
                continue;
            }
            let g = &mut grad[base + o * n_in..base + (o + 1) * n_in];
            g.iter_mut().zip(input).for_each(|(gi, a)| *gi += d * a);
            grad[base + n_in * n_out + o] += d;
        }
        if l > 0 {
            let w = &params[base..base + n_in * n_out];
            let gate = &pass.gates[l];
            delta = (0..n_in)
                .map(|i| {
                    if gate[i] == 0.0 {
                        return 0.0;
                    }
                    gate[i] * (0..n_out).map(|o| w[o * n_in + i] * delta[o]).sum::<f64>()
                })
                .collect();
        }
    }
    loss
}

impl Mlp {
    /// Mean cross-entropy and its gradient at `params` with dropout off,
    /// on inputs as given (no standardization).
    pub fn loss_and_gradient(sizes: &[usize], params: &[f64], x: &[Vec<f64>], y: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; params.len()];
        let mut loss = 0.0;
        for (row, &yi) in x.iter().zip(y) {
            let pass = forward(sizes, params, row, None);
            loss += backprop(sizes, params, &pass, yi, &mut grad);
        }
        let n = x.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }

    /// Randomly initialized parameters for the given layer sizes.
    pub fn initial_params(sizes: &[usize], seed: u64) -> Vec<f64> {
        init_params(sizes, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Classifier for Mlp {
    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let row = self.scaler.transform(x);
        forward(&self.sizes, &self.params, &row, None).acts.pop().unwrap_or_default()
    }
}

pub fn fit_mlp(data: &Dataset, params: &MlpParams) -> Result<Mlp> {
    data.require_finite()?;
    data.require_two_classes()?;
    if !(0.0..1.0).contains(&params.dropout) {
        return Err(Error::Parameter(format!("dropout must be in [0, 1), got {}", params.dropout)));
    }
    if params.batch_size == 0 || params.hidden.contains(&0) || !(params.learning_rate > 0.0) {
        return Err(Error::Parameter("batch size, layer widths and learning rate must be positive".into()));
    }
    let scaler = Standardizer::fit(&data.x);
    let x = scaler.transform_all(&data.x);
    let mut sizes = vec![data.n_features()];
    sizes.extend(&params.hidden);
    sizes.push(data.n_classes);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut w = init_params(&sizes, &mut rng);
    let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);
    let mut m = vec![0.0; w.len()];
    let mut v = vec![0.0; w.len()];
    let mut step = 0i32;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_history = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            let mut grad = vec![0.0; w.len()];
            for &i in batch {
                let mut drop = Dropout { rate: params.dropout, rng: &mut rng };
                let dropout = if params.dropout > 0.0 { Some(&mut drop) } else { None };
                let pass = forward(&sizes, &w, &x[i], dropout);
                epoch_loss += backprop(&sizes, &w, &pass, data.y[i], &mut grad);
            }
            let scale = 1.0 / batch.len() as f64;
            step += 1;
            let c1 = 1.0 - libm::pow(beta1, f64::from(step));
            let c2 = 1.0 - libm::pow(beta2, f64::from(step));
            for j in 0..w.len() {
                let g = grad[j] * scale;
                m[j] = beta1 * m[j] + (1.0 - beta1) * g;
                v[j] = beta2 * v[j] + (1.0 - beta2) * g * g;
                w[j] -= params.learning_rate * (m[j] / c1) / (sqrt(v[j] / c2) + eps);
            }
        }
        let mean_loss = epoch_loss / data.len() as f64;
        if !mean_loss.is_finite() || w.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        loss_history.push(mean_loss);
    }
    Ok(Mlp { scaler, sizes, params: w, loss_history })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let c = i % 2;
            let s = if c == 1 { 1.0 } else { -1.0 };
            x.push(vec![s * (1.0 + 0.05 * i as f64), 0.3 * (i % 5) as f64]);
            y.push(c);
        }
        Dataset::new(x, y, 2).unwrap()
    }

    #[test]
    fn learns_separable_set() {
        let d = separable();
        let m = fit_mlp(&d, &MlpParams { hidden: vec![16, 8], ..MlpParams::default() }).unwrap();
        assert!(d.x.iter().zip(&d.y).all(|(r, &c)| m.predict(r) == c));
        assert!(m.loss_history.last().unwrap() < &m.loss_history[0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sizes = [3usize, 5, 4, 3];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<Vec<f64>> = (0..6).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let y = vec![0, 1, 2, 0, 1, 2];
        let p = Mlp::initial_params(&sizes, 9);
        let (_, g) = Mlp::loss_and_gradient(&sizes, &p, &x, &y);
        let h = 1e-6;
        for i in 0..p.len() {
            let mut a = p.clone();
            let mut b = p.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (Mlp::loss_and_gradient(&sizes, &a, &x, &y).0 - Mlp::loss_and_gradient(&sizes, &b, &x, &y).0) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-4 * g[i].abs().max(1e-3), "param {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn dropout_changes_training_not_inference() {
        let d = separable();
        let base = MlpParams { hidden: vec![8], epochs: 5, ..MlpParams::default() };
        let on = fit_mlp(&d, &base).unwrap();
        let off = fit_mlp(&d, &MlpParams { dropout: 0.0, ..base.clone() }).unwrap();
        assert_ne!(on.loss_history, off.loss_history);
        assert_eq!(on.predict_proba(&[0.5, 0.1]), on.predict_proba(&[0.5, 0.1]));
        assert_eq!(fit_mlp(&d, &base).unwrap(), on);
    }

    #[test]
    fn divergence_reports_epoch() {
        let d = separable();
        let r = fit_mlp(&d, &MlpParams { hidden: vec![4], learning_rate: 1e300, epochs: 3, ..MlpParams::default() });
        assert!(matches!(r, Err(Error::Divergence { .. })), "{r:?}");
    }
}
