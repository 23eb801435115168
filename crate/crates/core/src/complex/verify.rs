use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::filtration::Filtration;
use super::meb::min_enclosing_ball;
use crate::embedding::PointCloud;
use crate::{Error, Result};

/// Slack allowed between a simplex's value and its enclosing-ball diameter.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A simplex whose balls have no common point at the scale it claims to enter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub position: usize,
    pub vertices: Vec<usize>,
    pub value: f64,
    pub meb_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checked: usize,
    pub tol: f64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the nerve condition for every simplex: the balls of diameter
/// `value` around its vertices must intersect, i.e. twice the minimal
/// enclosing radius must not exceed `value + tol`. For convex balls this
/// certifies that the complex is homotopy equivalent to the union of balls at
/// every scale of the filtration.
pub fn verify_homotopy_equivalence(f: &Filtration, cloud: &PointCloud, tol: f64) -> Result<VerificationReport> {
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut violations = Vec::new();
    for (position, s) in f.simplices.iter().enumerate() {
        if let Some(&v) = s.vertices.iter().find(|&&v| v >= cloud.n) {
            return Err(Error::Structural(format!(
                "simplex {s} references vertex {v} but the cloud has {} points",
                cloud.n
            )));
        }
        if s.vertices.len() < 2 {
            continue;
        }
        let pts: Vec<&[f64]> = s.vertices.iter().map(|&v| cloud.point(v)).collect();
        let diameter = min_enclosing_ball(&pts)?.diameter();
        if diameter > s.value + tol {
            violations.push(Violation {
                position,
                vertices: s.vertices.clone(),
                value: s.value,
                meb_diameter: diameter,
            });
        }
    }
    Ok(VerificationReport { checked: f.len(), tol, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cech_filtration, build_rips_filtration, Filtration, FiltrationKind, Simplex};
    use crate::num::sqrt;
    use alloc::vec;
    use alloc::vec::Vec;

    fn cloud(points: &[[f64; 3]]) -> PointCloud {
        let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        PointCloud::from_points(&pts, "t").unwrap()
    }

    #[test]
    fn rips_triangle_violates() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, sqrt(3.0) / 2.0, 0.0]]);
        let f = build_rips_filtration(&c, 1.05, 2).unwrap();
        let report = verify_homotopy_equivalence(&f, &c, DEFAULT_TOL).unwrap();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.vertices, vec![0, 1, 2]);
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!((v.meb_diameter - 1.154_700_5).abs() < 1e-6);
    }

    #[test]
    fn cech_triangle_passes() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, sqrt(3.0) / 2.0, 0.0]]);
        let f = build_cech_filtration(&c, 3.0, 2).unwrap();
        assert!(verify_homotopy_equivalence(&f, &c, DEFAULT_TOL).unwrap().passed());
    }

    #[test]
    fn out_of_range_vertex_is_structural() {
        let c = cloud(&[[0.0, 0.0, 0.0]]);
        let f = Filtration {
            simplices: vec![Simplex::new(vec![0], 0.0), Simplex::new(vec![1], 0.0)],
            kind: FiltrationKind::Rips,
            point_count: 2,
            max_dim: 1,
            epsilon_max: 1.0,
        };
        assert!(matches!(verify_homotopy_equivalence(&f, &c, DEFAULT_TOL), Err(Error::Structural(_))));
    }
}
