use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dist;
use crate::{Error, Result};

/// A closed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn contains(&self, p: &[f64]) -> bool {
        self.radius >= 0.0 && dist(&self.center, p) <= self.radius * (1.0 + 1e-12)
    }

    fn empty(d: usize) -> Ball {
        Ball { center: vec![0.0; d], radius: -1.0 }
    }
}

/// Smallest ball containing every point, by Welzl's move-to-front recursion.
///
/// The order of `points` is the processing order, so results are
/// deterministic. Boundary sets never exceed `d + 1` points.
pub fn min_enclosing_ball(points: &[&[f64]]) -> Result<Ball> {
    let first = points.first().ok_or_else(|| Error::Parameter("minimal enclosing ball of no points".into()))?;
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Parameter("points have different dimensions".into()));
    }
    if points.iter().flat_map(|p| p.iter()).any(|c| !c.is_finite()) {
        return Err(Error::Input("point with a non-finite coordinate".into()));
    }
    let mut pts: Vec<&[f64]> = points.to_vec();
    let mut boundary: Vec<&[f64]> = Vec::with_capacity(d + 1);
    let n = pts.len();
    Ok(welzl(&mut pts, n, &mut boundary, d))
}

fn welzl<'a>(pts: &mut [&'a [f64]], n: usize, boundary: &mut Vec<&'a [f64]>, d: usize) -> Ball {
    let mut ball = ball_on_boundary(boundary, d);
    if boundary.len() == d + 1 {
        return ball;
    }
    for i in 0..n {
        let p = pts[i];
        if !ball.contains(p) {
            boundary.push(p);
            ball = welzl(pts, i, boundary, d);
            boundary.pop();
            pts[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball whose boundary passes through every point of `boundary`.
fn ball_on_boundary(boundary: &[&[f64]], d: usize) -> Ball {
    match boundary.len() {
        0 => Ball::empty(d),
        1 => Ball { center: boundary[0].to_vec(), radius: 0.0 },
        _ => circumball(boundary).unwrap_or_else(|| degenerate_ball(boundary, d)),
    }
}

/// Circumcenter restricted to the affine hull: `c = r₀ + Σ λᵢ (rᵢ − r₀)` with
/// `2 (rᵢ − r₀)·(c − r₀) = |rᵢ − r₀|²`.
fn circumball(boundary: &[&[f64]]) -> Option<Ball> {
    let origin = boundary[0];
    let k = boundary.len() - 1;
    let diffs: Vec<Vec<f64>> = boundary[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = vec![0.0; k * (k + 1)];
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            a[i * (k + 1) + j] = diffs[i].iter().zip(&diffs[j]).map(|(x, y)| x * y).sum();
        }
        let sq = a[i * (k + 1) + i];
        a[i * (k + 1) + k] = 0.5 * sq;
        scale = scale.max(sq);
    }
    let lambda = solve(&mut a, k, scale * 1e-12)?;
    let mut center = origin.to_vec();
    for (l, diff) in lambda.iter().zip(&diffs) {
        for (c, v) in center.iter_mut().zip(diff) {
            *c += l * v;
        }
    }
    let radius = boundary.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

/// Gaussian elimination with partial pivoting on an augmented k × (k+1) matrix.
fn solve(a: &mut [f64], k: usize, pivot_tol: f64) -> Option<Vec<f64>> {
    let w = k + 1;
    for col in 0..k {
        let pivot = (col..k).max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))?;
        if !(a[pivot * w + col].abs() > pivot_tol) {
            return None;
        }
        if pivot != col {
            for j in 0..w {
                a.swap(pivot * w + j, col * w + j);
            }
        }
        for row in col + 1..k {
            let f = a[row * w + col] / a[col * w + col];
            for j in col..w {
                a[row * w + j] -= f * a[col * w + j];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| a[row * w + j] * x[j]).sum();
        x[row] = (a[row * w + k] - s) / a[row * w + row];
    }
    Some(x)
}

// Affinely dependent boundary (e.g. collinear triples): fall back to the
// smallest ball over proper subsets that still covers every point.
fn degenerate_ball(boundary: &[&[f64]], d: usize) -> Ball {
    let m = boundary.len();
    let mut best: Option<Ball> = None;
    for mask in 1u32..(1 << m) - 1 {
        let subset: Vec<&[f64]> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| boundary[i]).collect();
        let ball = ball_on_boundary(&subset, d);
        if boundary.iter().all(|p| ball.contains(p)) && best.as_ref().is_none_or(|b| ball.radius < b.radius) {
            best = Some(ball);
        }
    }
    best.unwrap_or_else(|| {
        let center: Vec<f64> = (0..d).map(|j| boundary.iter().map(|p| p[j]).sum::<f64>() / m as f64).collect();
        let radius = boundary.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
        Ball { center, radius }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::sqrt;
    use proptest::prelude::*;

    fn meb(points: &[[f64; 3]]) -> Ball {
        let refs: Vec<&[f64]> = points.iter().map(|p| &p[..]).collect();
        min_enclosing_ball(&refs).unwrap()
    }

    #[test]
    fn single_point() {
        let b = meb(&[[1.0, 2.0, 3.0]]);
        assert_eq!(b.radius, 0.0);
        assert_eq!(b.center, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn diameter_pair() {
        let b = meb(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert!((b.radius - 1.0).abs() < 1e-15);
        assert_eq!(b.center, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn equilateral_triangle() {
        let h = sqrt(3.0) / 2.0;
        let b = meb(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]]);
        assert!((b.radius - 1.0 / sqrt(3.0)).abs() < 1e-12);
        assert!((b.radius - 0.577_350).abs() < 1e-6);
    }

    #[test]
    fn right_triangle() {
        let b = meb(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]);
        assert!((b.radius - 2.5).abs() < 1e-12);
        assert!((b.center[0] - 1.5).abs() < 1e-12 && (b.center[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points() {
        let b = meb(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [4.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert!((b.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tetrahedron() {
        let s = 1.0 / sqrt(2.0);
        let b = meb(&[[1.0, 0.0, -s], [-1.0, 0.0, -s], [0.0, 1.0, s], [0.0, -1.0, s]]);
        // side 2, circumradius side·√(3/8)
        assert!((b.radius - 2.0 * sqrt(3.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(min_enclosing_ball(&[]), Err(Error::Parameter(_))));
    }

    // Coarse grid search over candidate centers; the true radius can only be smaller.
    fn grid_radius(points: &[[f64; 3]]) -> f64 {
        let lo: Vec<f64> = (0..3).map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..3).map(|k| points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let steps = 24;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                for l in 0..=steps {
                    let c = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                        lo[2] + (hi[2] - lo[2]) * l as f64 / steps as f64,
                    ];
                    let r = points.iter().map(|p| dist(&c, p)).fold(0.0, f64::max);
                    best = best.min(r);
                }
            }
        }
        best
    }

    #[test]
    fn grid_oracle_agrees_on_triangles() {
        let h = sqrt(3.0) / 2.0;
        for pts in [
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]],
            [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]],
        ] {
            let exact = meb(&pts).radius;
            let grid = grid_radius(&pts);
            assert!(exact <= grid + 1e-12);
            assert!(grid - exact < 0.05 * exact);
        }
    }

    proptest! {
        #[test]
        fn encloses_and_is_reproducible(pts in proptest::collection::vec(proptest::array::uniform3(-5.0f64..5.0), 1..12)) {
            let b = meb(&pts);
            for p in &pts {
                prop_assert!(dist(&b.center, p) <= b.radius * (1.0 + 1e-9) + 1e-12);
            }
            let again = meb(&pts);
            prop_assert_eq!(b.radius, again.radius);
            // no point may lie further than the diameter
            let diam = pts.iter().flat_map(|p| pts.iter().map(move |q| dist(p, q))).fold(0.0, f64::max);
            prop_assert!(2.0 * b.radius >= diam - 1e-9);
            prop_assert!(b.radius <= diam * (3.0f64 / 8.0).sqrt() + 1e-9);
        }
    }
}
