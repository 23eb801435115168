use alloc::vec;
use alloc::vec::Vec;

use super::{PersistenceDiagram, PersistencePair};
use crate::complex::Filtration;
use crate::Result;

/// Z/2 symmetric difference of two sorted index lists.
fn add_into(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            core::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

/// Standard left-to-right column reduction of the boundary matrix.
///
/// A column whose lowest entry is row `i` pairs simplex `i` (birth) with the
/// column's simplex (death); simplices that never appear as a pivot and whose
/// column reduces to zero start essential classes. Zero-length pairs are kept.
pub fn compute_persistence(f: &Filtration) -> Result<PersistenceDiagram> {
    f.validate()?;
    let index = f.index();
    let n = f.len();
    let mut columns: Vec<Vec<usize>> = f
        .simplices
        .iter()
        .map(|s| {
            let mut col: Vec<usize> = s.facets().map(|facet| index[&facet[..]]).collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut killed = vec![false; n];
    let mut diagram = PersistenceDiagram::empty(f.max_dim, f.epsilon_max);

    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match pivot_owner[low] {
                Some(k) => {
                    let other = core::mem::take(&mut columns[k]);
                    add_into(&mut columns[j], &other);
                    columns[k] = other;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            pivot_owner[low] = Some(j);
            killed[low] = true;
            let birth = &f.simplices[low];
            diagram.pairs[birth.dim()].push(PersistencePair {
                birth: birth.value,
                death: f.simplices[j].value,
                birth_simplex: low,
                death_simplex: Some(j),
            });
        }
    }
    for (i, s) in f.simplices.iter().enumerate() {
        if columns[i].is_empty() && !killed[i] {
            diagram.pairs[s.dim()].push(PersistencePair {
                birth: s.value,
                death: f64::INFINITY,
                birth_simplex: i,
                death_simplex: None,
            });
        }
    }
    for bars in &mut diagram.pairs {
        bars.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
                .then(a.birth_simplex.cmp(&b.birth_simplex))
        });
    }
    Ok(diagram)
}
