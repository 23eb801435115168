use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::num::sqrt;

/// Per-feature standardization to zero mean and unit variance, fitted on
/// training data. Constant features are centered only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Standardizer {
        let p = x.first().map_or(0, Vec::len);
        let n = x.len().max(1) as f64;
        let mut mean = alloc::vec![0.0; p];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; p];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .iter()
            .map(|s| {
                let sd = sqrt(s / n);
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn transform_all(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn unit_moments() {
        let x = vec![vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]];
        let s = Standardizer::fit(&x);
        let t = s.transform_all(&x);
        let m: f64 = t.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        let v: f64 = t.iter().map(|r| r[0] * r[0]).sum::<f64>() / 3.0;
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-12);
        assert!(t.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn stored_parameters_reproduce_training_transform() {
        let x = vec![vec![0.3, -2.0], vec![1.7, 4.0], vec![-0.2, 0.5]];
        let s = Standardizer::fit(&x);
        let again = Standardizer { mean: s.mean.clone(), scale: s.scale.clone() };
        let held_out = [0.9, 1.1];
        assert_eq!(s.transform(&held_out), again.transform(&held_out));
        assert_eq!(s.transform_all(&x), again.transform_all(&x));
    }
}
