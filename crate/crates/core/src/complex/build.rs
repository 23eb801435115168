use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::filtration::{Filtration, FiltrationKind, Simplex};
use super::meb::min_enclosing_ball;
use super::dist;
use crate::embedding::PointCloud;
use crate::{Error, Result};

/// Diameter of the cloud's minimal enclosing ball; every simplex is present
/// in the Čech complex at this scale.
pub fn default_epsilon_max(cloud: &PointCloud) -> f64 {
    let points: Vec<&[f64]> = cloud.points().collect();
    match min_enclosing_ball(&points) {
        Ok(ball) if ball.diameter() > 0.0 => ball.diameter(),
        _ => f64::MIN_POSITIVE,
    }
}

fn check_inputs(cloud: &PointCloud, epsilon_max: f64) -> Result<()> {
    if !(epsilon_max > 0.0) || epsilon_max.is_nan() {
        return Err(Error::Parameter(format!("epsilon_max must be positive, got {epsilon_max}")));
    }
    if cloud.coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::Input("point cloud has non-finite coordinates".into()));
    }
    Ok(())
}

struct Graph {
    dist: Vec<f64>,
    n: usize,
    /// Higher-indexed neighbours within epsilon_max.
    upper: Vec<Vec<usize>>,
}

impl Graph {
    fn new(cloud: &PointCloud, epsilon_max: f64) -> Graph {
        let n = cloud.n;
        let mut d = vec![0.0; n * n];
        let mut upper = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(cloud.point(i), cloud.point(j));
                d[i * n + j] = v;
                d[j * n + i] = v;
                if v <= epsilon_max {
                    upper[i].push(j);
                }
            }
        }
        Graph { dist: d, n, upper }
    }

    #[inline]
    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    #[inline]
    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.upper[a.min(b)].binary_search(&a.max(b)).is_ok()
    }
}

/// Clique expansion of the neighbourhood graph. `value` computes the entry
/// scale of a new simplex from its parent's value; returning `None` prunes it
/// together with every coface reached through it.
fn expand<F>(graph: &Graph, max_dim: usize, mut value: F) -> Vec<Simplex>
where
    F: FnMut(&[usize], f64) -> Option<f64>,
{
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, f64, Vec<usize>)> = Vec::new();
    for v in (0..graph.n).rev() {
        stack.push((vec![v], 0.0, graph.upper[v].clone()));
    }
    while let Some((vertices, val, candidates)) = stack.pop() {
        if vertices.len() <= max_dim {
            for (k, &c) in candidates.iter().enumerate().rev() {
                let mut next = vertices.clone();
                next.push(c);
                if let Some(v) = value(&next, val) {
                    let rest: Vec<usize> = candidates[k + 1..].iter().copied().filter(|&u| graph.adjacent(c, u)).collect();
                    stack.push((next, v, rest));
                }
            }
        }
        out.push(Simplex::new(vertices, val));
    }
    out
}

/// Vietoris–Rips filtration: a vertex set enters at its longest edge.
pub fn build_rips_filtration(cloud: &PointCloud, epsilon_max: f64, max_dim: usize) -> Result<Filtration> {
    check_inputs(cloud, epsilon_max)?;
    let graph = Graph::new(cloud, epsilon_max);
    let simplices = expand(&graph, max_dim, |vs, parent| {
        let new = *vs.last().unwrap();
        let longest = vs[..vs.len() - 1].iter().map(|&u| graph.d(u, new)).fold(parent, f64::max);
        Some(longest)
    });
    Filtration::new(simplices, FiltrationKind::Rips, cloud.n, max_dim, epsilon_max)
}

/// Čech filtration: Rips candidates re-valued by the diameter of their
/// minimal enclosing ball and kept only when that diameter is ≤ `epsilon_max`.
pub fn build_cech_filtration(cloud: &PointCloud, epsilon_max: f64, max_dim: usize) -> Result<Filtration> {
    check_inputs(cloud, epsilon_max)?;
    let graph = Graph::new(cloud, epsilon_max);
    let mut simplices = expand(&graph, max_dim, |vs, _| {
        if vs.len() == 2 {
            return Some(graph.d(vs[0], vs[1]));
        }
        let pts: Vec<&[f64]> = vs.iter().map(|&v| cloud.point(v)).collect();
        let diameter = min_enclosing_ball(&pts).ok()?.diameter();
        // a few ulps of slack so a set pinned by the cloud's own enclosing
        // ball is not lost to rounding at ε_max = that ball's diameter
        (diameter <= epsilon_max * (1.0 + 8.0 * f64::EPSILON)).then_some(diameter.min(epsilon_max))
    });
    enforce_monotone(&mut simplices);
    Filtration::new(simplices, FiltrationKind::Cech, cloud.n, max_dim, epsilon_max)
}

// Enclosing-ball diameters of a face and coface can disagree in the last ulp
// when both are pinned by the same boundary points; lift cofaces to their
// largest facet value so faces always enter first. A coface whose facet was
// rejected is dropped, keeping the complex closed under faces.
fn enforce_monotone(simplices: &mut Vec<Simplex>) {
    simplices.sort_by_key(|s| s.vertices.len());
    let mut values: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    simplices.retain_mut(|s| {
        let mut lift = s.value;
        if s.vertices.len() > 1 {
            for f in s.facets() {
                match values.get(&f) {
                    Some(&v) => lift = lift.max(v),
                    None => return false,
                }
            }
        }
        s.value = lift;
        values.insert(s.vertices.clone(), lift);
        true
    });
}
