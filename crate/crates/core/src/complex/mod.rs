//! Rips and Čech filtrations over a point cloud.
//!
//! A vertex set spans a Čech simplex at scale ε when the balls of diameter ε
//! around its vertices share a common point, which happens exactly when the
//! minimal enclosing ball of the vertices has diameter at most ε. Filtration
//! values therefore use the diameter convention: edges enter at the pairwise
//! distance and higher simplices at twice the enclosing radius.

mod build;
mod filtration;
mod meb;
mod verify;

use alloc::format;

use crate::num::sqrt;
use crate::{Error, Result};

pub use build::{build_cech_filtration, build_rips_filtration, default_epsilon_max};
pub use filtration::{Filtration, FiltrationKind, Simplex, DEFAULT_MAX_DIM};
pub use meb::{min_enclosing_ball, Ball};
pub use verify::{verify_homotopy_equivalence, VerificationReport, Violation, DEFAULT_TOL};

/// Euclidean distance.
pub fn distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Parameter(format!(
            "cannot measure distance between points of dimension {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(dist(p, q))
}

#[inline]
pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    sqrt(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
}
