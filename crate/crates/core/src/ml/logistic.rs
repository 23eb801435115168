use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::scaler::Standardizer;
use super::{Classifier, Dataset};
use crate::num::{dot, exp, ln};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Inverse regularization strength.
    pub c: f64,
    pub max_iter: usize,
    /// Stop once the gradient's ∞-norm drops below this.
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { c: 5.0, max_iter: 180, tol: 1e-6 }
    }
}

/// `Σᵢ −ln softmax(W xᵢ + b)[yᵢ] + |W|² / (2C)` on standardized features.
/// Parameters are laid out class by class as `[w₁ … w_p, b]`; biases are not penalized.
pub struct LogisticObjective<'a> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [usize],
    pub n_classes: usize,
    pub c: f64,
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = exp(*v - m);
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

impl LogisticObjective<'_> {
    pub fn n_params(&self) -> usize {
        self.n_classes * (self.width() + 1)
    }

    fn width(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    fn scores(&self, w: &[f64], row: &[f64]) -> Vec<f64> {
        let p = self.width();
        (0..self.n_classes)
            .map(|k| {
                let wk = &w[k * (p + 1)..(k + 1) * (p + 1)];
                dot(&wk[..p], row) + wk[p]
            })
            .collect()
    }

    pub fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let p = self.width();
        let mut grad = vec![0.0; w.len()];
        let mut loss = 0.0;
        for (row, &yi) in self.x.iter().zip(self.y) {
            let mut z = self.scores(w, row);
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + ln(z.iter().map(|v| exp(v - m)).sum::<f64>());
            loss += lse - z[yi];
            softmax_in_place(&mut z);
            for k in 0..self.n_classes {
                let r = z[k] - if k == yi { 1.0 } else { 0.0 };
                let g = &mut grad[k * (p + 1)..(k + 1) * (p + 1)];
                for (gj, xj) in g[..p].iter_mut().zip(row) {
                    *gj += r * xj;
                }
                g[p] += r;
            }
        }
        for k in 0..self.n_classes {
            for j in 0..p {
                let i = k * (p + 1) + j;
                loss += w[i] * w[i] / (2.0 * self.c);
                grad[i] += w[i] / self.c;
            }
        }
        (loss, grad)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Limited-memory BFGS with Armijo backtracking. Returns the final point and
/// the number of iterations taken.
fn lbfgs<F>(f: F, mut x: Vec<f64>, max_iter: usize, tol: f64) -> Result<(Vec<f64>, usize)>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    const MEMORY: usize = 10;
    let (mut fx, mut g) = f(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    for iter in 0..max_iter {
        if inf_norm(&g) < tol {
            return Ok((x, iter));
        }
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
        }
        let mut step = if history.is_empty() { 1.0 / inf_norm(&g).max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((next, f_next, g_next)) = accepted else {
            // no decrease possible at machine precision
            return Ok((x, iter));
        };
        let s: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = next;
        fx = f_next;
        g = g_next;
        if !fx.is_finite() {
            return Err(Error::Numeric(format!("logistic objective became non-finite at iteration {iter}")));
        }
    }
    Ok((x, max_iter))
}

/// Multinomial L2-regularized logistic regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub scaler: Standardizer,
    pub weights: Vec<f64>,
    pub n_classes: usize,
    pub iterations: usize,
}

impl Classifier for LogisticRegression {
    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let row = self.scaler.transform(x);
        let p = row.len();
        let mut z: Vec<f64> = (0..self.n_classes)
            .map(|k| {
                let wk = &self.weights[k * (p + 1)..(k + 1) * (p + 1)];
                dot(&wk[..p], &row) + wk[p]
            })
            .collect();
        softmax_in_place(&mut z);
        z
    }
}

pub fn fit_logistic_regression(data: &Dataset, params: &LogisticParams) -> Result<LogisticRegression> {
    data.require_finite()?;
    data.require_two_classes()?;
    if !(params.c > 0.0) {
        return Err(Error::Parameter(format!("regularization strength C must be positive, got {}", params.c)));
    }
    let scaler = Standardizer::fit(&data.x);
    let x = scaler.transform_all(&data.x);
    let objective = LogisticObjective { x: &x, y: &data.y, n_classes: data.n_classes, c: params.c };
    let start = vec![0.0; objective.n_params()];
    let (weights, iterations) = lbfgs(|w| objective.value_and_gradient(w), start, params.max_iter, params.tol)?;
    Ok(LogisticRegression { scaler, weights, n_classes: data.n_classes, iterations })
}
