use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ingest::Label;
use crate::persistence::{betti_curve, entropy_of_lifetimes, uniform_grid, PersistenceDiagram, FEATURE_DIMS};
use crate::{Error, Result};

/// Betti-curve samples per homology dimension.
pub const BETTI_SAMPLES: usize = 16;

const STATS: [&str; 6] = ["entropy", "entropy_present", "bar_count", "total_persistence", "max_lifetime", "mean_lifetime"];

/// Six summary statistics plus the Betti samples for each of H0, H1, H2.
pub const FEATURE_COUNT: usize = FEATURE_DIMS.len() * (STATS.len() + BETTI_SAMPLES);

/// One subject's diagram with a description of the pipeline that made it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectDiagram {
    pub subject_id: String,
    pub label: Label,
    pub diagram: PersistenceDiagram,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub subject_id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Column names in the order of [`FeatureVector::values`].
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for k in FEATURE_DIMS {
        names.extend(STATS.iter().map(|s| format!("h{k}_{s}")));
    }
    for k in FEATURE_DIMS {
        names.extend((0..BETTI_SAMPLES).map(|i| format!("h{k}_betti_{i:02}")));
    }
    names
}

/// Summary statistics of one dimension; infinite bars are capped at `cap`.
fn dimension_stats(diagram: &PersistenceDiagram, k: usize, cap: f64) -> [f64; 6] {
    let lifetimes: Vec<f64> = diagram.dim(k).iter().map(|p| p.capped_lifetime(cap)).collect();
    let entropy = entropy_of_lifetimes(&lifetimes);
    let total: f64 = lifetimes.iter().sum();
    let max = lifetimes.iter().copied().fold(0.0, f64::max);
    let mean = if lifetimes.is_empty() { 0.0 } else { total / lifetimes.len() as f64 };
    [
        entropy.unwrap_or(0.0),
        if entropy.is_some() { 1.0 } else { 0.0 },
        lifetimes.len() as f64,
        total,
        max,
        mean,
    ]
}

/// Builds one vector per subject, in input order. The Betti grid spans
/// `[0, ε_max]` with ε_max the largest scale over all subjects.
pub fn assemble_features(subjects: &[SubjectDiagram]) -> Result<Vec<FeatureVector>> {
    let Some(first) = subjects.first() else {
        return Err(Error::Empty("no subjects to assemble".into()));
    };
    if let Some(odd) = subjects.iter().find(|s| s.provenance != first.provenance) {
        return Err(Error::Consistency(format!(
            "subject {} was processed with `{}` but subject {} with `{}`",
            odd.subject_id, odd.provenance, first.subject_id, first.provenance
        )));
    }
    let eps_max = subjects.iter().map(|s| s.diagram.epsilon_max).fold(0.0, f64::max);
    if !eps_max.is_finite() {
        return Err(Error::Numeric("diagram scale is not finite".into()));
    }
    let grid = uniform_grid(eps_max, BETTI_SAMPLES);
    subjects
        .iter()
        .map(|s| {
            let cap = s.diagram.epsilon_max;
            let mut values = Vec::with_capacity(FEATURE_COUNT);
            for k in FEATURE_DIMS {
                values.extend(dimension_stats(&s.diagram, k, cap));
            }
            for k in FEATURE_DIMS {
                values.extend(betti_curve(&s.diagram, k, &grid)?.values.iter().map(|&b| b as f64));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!("subject {} has a non-finite feature", s.subject_id)));
            }
            Ok(FeatureVector { subject_id: s.subject_id.to_string(), label: s.label, values })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;
    use alloc::vec;

    fn bar(birth: f64, death: f64) -> PersistencePair {
        PersistencePair { birth, death, birth_simplex: 0, death_simplex: None }
    }

    fn subject(id: &str, diagram: PersistenceDiagram) -> SubjectDiagram {
        SubjectDiagram { subject_id: id.into(), label: Label::Nsr, diagram, provenance: "p".into() }
    }

    #[test]
    fn names_match_count() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURE_COUNT);
        assert_eq!(FEATURE_COUNT, 66);
        assert_eq!(names[7], "h1_entropy_present");
        assert_eq!(names[18], "h0_betti_00");
    }

    #[test]
    fn hand_built_diagram() {
        let mut d = PersistenceDiagram::empty(2, 3.0);
        d.pairs[0] = vec![bar(0.0, 1.0), bar(0.0, f64::INFINITY)];
        d.pairs[1] = vec![bar(1.0, 2.0), bar(1.0, 4.0 / 3.0)];
        let f = assemble_features(&[subject("a", d)]).unwrap().remove(0).values;
        // H0 lifetimes {1, 3}
        let e0 = -(0.25 * libm::log(0.25) + 0.75 * libm::log(0.75));
        assert!((f[0] - e0).abs() < 1e-15);
        assert_eq!(&f[1..6], &[1.0, 2.0, 4.0, 3.0, 2.0]);
        // H1 lifetimes {1, 1/3}
        assert_eq!(f[8], 2.0);
        assert!((f[9] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(f[10], 1.0);
        // grid step 0.2 on [0, 3]: H0 sees 2 bars at ε = 0 and 0.2…0.8, then 1
        assert_eq!(&f[18..24], &[2.0, 2.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(f[33], 1.0);
        // H1 alive on [1, 2): samples 5..=9
        let h1: Vec<f64> = f[34..50].to_vec();
        assert_eq!(h1.iter().sum::<f64>(), 7.0);
        assert_eq!(h1[5], 2.0);
        assert_eq!(h1[10], 0.0);
    }

    #[test]
    fn empty_h2_has_zero_flag() {
        let mut d = PersistenceDiagram::empty(2, 1.0);
        d.pairs[0] = vec![bar(0.0, f64::INFINITY)];
        let f = assemble_features(&[subject("a", d.clone()), subject("b", d)]).unwrap();
        assert_eq!(f[0].values.len(), f[1].values.len());
        assert!(f[0].values[12..18].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mixed_provenance_rejected() {
        let d = PersistenceDiagram::empty(2, 1.0);
        let mut b = subject("b", d.clone());
        b.provenance = "q".into();
        assert!(matches!(assemble_features(&[subject("a", d), b]), Err(Error::Consistency(_))));
    }
}
