//! Spectral embedding of a trial matrix into a low-dimensional point cloud.
//!
//! The trial matrix `X` (n × t) is factored as `X = U Σ Vᵀ` by one-sided
//! Jacobi rotations on its rows. With `Λ = Σ²` the point cloud
//! `P = U_d Λ_d^{1/2} = U_d Σ_d` holds the classical principal coordinates of
//! the trials.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ingest::{Label, TrialMatrix};
use crate::num::{dot, norm, sqrt};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// Left singular vectors and singular values of a trial matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    /// n × n, row-major; column `j` pairs with `singular_values[j]`.
    pub left_vectors: Vec<f64>,
    pub n: usize,
    /// min(n, t) values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Numerical rank.
    pub rank: usize,
    pub subject_id: String,
    pub label: Option<Label>,
}

impl SpectralDecomposition {
    #[inline]
    pub fn u(&self, row: usize, col: usize) -> f64 {
        self.left_vectors[row * self.n + col]
    }
}

/// An n × d cloud of points, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub coords: Vec<f64>,
    pub n: usize,
    pub d: usize,
    pub subject_id: String,
    pub label: Option<Label>,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, n: usize, d: usize, subject_id: impl Into<String>) -> Result<Self> {
        if d == 0 || coords.len() != n * d {
            return Err(Error::Input(format!(
                "point cloud needs n*d coordinates with d >= 1; got n={n}, d={d}, {} values",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Input(format!("point {} has a non-finite coordinate", i / d)));
        }
        Ok(PointCloud { coords, n, d, subject_id: subject_id.into(), label: None })
    }

    pub fn from_points(points: &[Vec<f64>], subject_id: impl Into<String>) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::Input("points have different dimensions".into()));
        }
        let coords = points.iter().flatten().copied().collect();
        PointCloud::new(coords, points.len(), d, subject_id)
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// H₂ needs at least d + 1 points to appear.
    pub fn supports_voids(&self) -> bool {
        self.n > self.d
    }
}

/// SVD of a trial matrix (rows are not modified; center them beforehand if wanted).
pub fn decompose(x: &TrialMatrix) -> Result<SpectralDecomposition> {
    let mut dec = decompose_matrix(&x.data, x.n, x.t)?;
    dec.subject_id = x.provenance.subject_id.clone();
    dec.label = Some(x.provenance.label);
    Ok(dec)
}

/// SVD of a row-major n × t matrix, keeping `U` and `Σ`.
pub fn decompose_matrix(data: &[f64], n: usize, t: usize) -> Result<SpectralDecomposition> {
    if n == 0 || t == 0 || data.len() != n * t {
        return Err(Error::Input(format!("matrix of {} values is not {n} x {t}", data.len())));
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite entry at row {}, column {}", i / t, i % t)));
    }
    let mut rows: Vec<f64> = data.to_vec();
    // rotation accumulator J with rows(X') = J rows(X)
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        j[i * n + i] = 1.0;
    }

    // rows this small are numerically zero (n > t leaves n − t of them)
    let negligible = {
        let fro2: f64 = data.iter().map(|v| v * v).sum();
        fro2 * (n as f64 * f64::EPSILON) * (n as f64 * f64::EPSILON)
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let a = &rows[p * t..(p + 1) * t];
                    let b = &rows[q * t..(q + 1) * t];
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for (x, y) in a.iter().zip(b) {
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    (alpha, beta, gamma)
                };
                if gamma == 0.0
                    || alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= ORTHO_TOL * sqrt(alpha * beta)
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tan = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + tan * tan);
                let s = c * tan;
                rotate(&mut rows, t, p, q, c, s);
                rotate(&mut j, n, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi SVD of a {n} x {t} matrix did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = rows.chunks_exact(t).map(norm).collect();
    let x_norm = norm(data);
    if x_norm > 0.0 {
        // X = Jᵀ X'
        let mut err = 0.0;
        for r in 0..n {
            for c in 0..t {
                let v: f64 = (0..n).map(|k| j[k * n + r] * rows[k * t + c]).sum();
                let d = data[r * t + c] - v;
                err += d * d;
            }
        }
        let rel = sqrt(err) / x_norm;
        if !(rel < 1e-8) {
            return Err(Error::Numeric(format!(
                "SVD of a {n} x {t} matrix failed reconstruction (relative error {rel:e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let k = n.min(t);
    let singular_values: Vec<f64> = order[..k].iter().map(|&i| norms[i]).collect();

    let mut left = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        let urow = &j[src * n..(src + 1) * n];
        // largest-magnitude entry of each column is made non-negative
        let mut lead = 0;
        for (i, v) in urow.iter().enumerate() {
            if v.abs() > urow[lead].abs() {
                lead = i;
            }
        }
        let sign = if urow[lead] < 0.0 { -1.0 } else { 1.0 };
        for (i, v) in urow.iter().enumerate() {
            left[i * n + col] = sign * v;
        }
    }

    let smax = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = smax * n.max(t) as f64 * f64::EPSILON;
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();

    Ok(SpectralDecomposition {
        left_vectors: left,
        n,
        singular_values,
        rank,
        subject_id: String::new(),
        label: None,
    })
}

fn rotate(m: &mut [f64], width: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = m.split_at_mut(q * width);
    let a = &mut head[p * width..(p + 1) * width];
    let b = &mut tail[..width];
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Principal coordinates `P[:, j] = U[:, j] · σ_j` for the top `d` singular values.
pub fn project_point_cloud(dec: &SpectralDecomposition, d: usize) -> Result<PointCloud> {
    let available = dec.singular_values.len();
    if d == 0 || d > available {
        return Err(Error::Parameter(format!(
            "embedding dimension {d} must be between 1 and {available} (numerical rank {})",
            dec.rank
        )));
    }
    let mut coords = Vec::with_capacity(dec.n * d);
    for i in 0..dec.n {
        for j in 0..d {
            coords.push(dec.u(i, j) * dec.singular_values[j]);
        }
    }
    let mut cloud = PointCloud::new(coords, dec.n, d, dec.subject_id.clone())?;
    cloud.label = dec.label;
    Ok(cloud)
}

/// Column norms of the cloud, which equal the retained singular values.
pub fn column_norms(cloud: &PointCloud) -> Vec<f64> {
    (0..cloud.d)
        .map(|j| sqrt(cloud.points().map(|p| p[j] * p[j]).sum()))
        .collect()
}

#[doc(hidden)]
pub fn row_gram_distance(a: &[f64], b: &[f64]) -> f64 {
    sqrt((dot(a, a) + dot(b, b) - 2.0 * dot(a, b)).max(0.0))
}
