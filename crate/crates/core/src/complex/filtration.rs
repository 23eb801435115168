use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Highest simplex dimension built by default (tetrahedra, so H₂ can die).
pub const DEFAULT_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    /// Strictly increasing point indices.
    pub vertices: Vec<usize>,
    /// Scale at which the simplex enters.
    pub value: f64,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>, value: f64) -> Self {
        Simplex { vertices, value }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Codimension-one faces, each missing one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = if self.vertices.len() > 1 { self.vertices.len() } else { 0 };
        (0..k).map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }

    pub(crate) fn filtration_cmp(&self, other: &Simplex) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}@{}", self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiltrationKind {
    Cech,
    Rips,
}

impl FiltrationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FiltrationKind::Cech => "cech",
            FiltrationKind::Rips => "rips",
        }
    }
}

impl core::str::FromStr for FiltrationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cech" | "čech" => Ok(FiltrationKind::Cech),
            "rips" | "vietoris-rips" => Ok(FiltrationKind::Rips),
            other => Err(Error::Parameter(format!("unknown complex kind `{other}`"))),
        }
    }
}

/// Simplices sorted by (value, dimension, vertices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtration {
    pub simplices: Vec<Simplex>,
    pub kind: FiltrationKind,
    pub point_count: usize,
    pub max_dim: usize,
    pub epsilon_max: f64,
}

impl Filtration {
    /// Sorts into filtration order and checks every invariant.
    pub fn new(
        mut simplices: Vec<Simplex>,
        kind: FiltrationKind,
        point_count: usize,
        max_dim: usize,
        epsilon_max: f64,
    ) -> Result<Self> {
        simplices.sort_by(Simplex::filtration_cmp);
        let f = Filtration { simplices, kind, point_count, max_dim, epsilon_max };
        f.validate()?;
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Position of every simplex keyed by its vertex list.
    pub fn index(&self) -> BTreeMap<&[usize], usize> {
        self.simplices.iter().enumerate().map(|(i, s)| (&s.vertices[..], i)).collect()
    }

    /// Checks vertex ordering, ranges, dimensions and that every facet is
    /// present earlier in the list with a value no larger than its coface.
    pub fn validate(&self) -> Result<()> {
        let index = self.index();
        if index.len() != self.simplices.len() {
            return Err(Error::Structural("filtration contains a duplicate simplex".into()));
        }
        for (pos, s) in self.simplices.iter().enumerate() {
            if s.vertices.is_empty() {
                return Err(Error::Structural(format!("simplex at position {pos} has no vertices")));
            }
            if !s.vertices.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Structural(format!("simplex {s} has unsorted or repeated vertices")));
            }
            if let Some(&v) = s.vertices.iter().find(|&&v| v >= self.point_count) {
                return Err(Error::Structural(format!(
                    "simplex {s} references vertex {v} but the cloud has {} points",
                    self.point_count
                )));
            }
            if s.dim() > self.max_dim {
                return Err(Error::Structural(format!("simplex {s} exceeds max dimension {}", self.max_dim)));
            }
            if !(s.value >= 0.0) {
                return Err(Error::Structural(format!("simplex {s} has a negative or NaN value")));
            }
            for facet in s.facets() {
                match index.get(&facet[..]) {
                    None => {
                        return Err(Error::Structural(format!("simplex {s} is missing facet {facet:?}")));
                    }
                    Some(&fpos) if fpos >= pos || self.simplices[fpos].value > s.value => {
                        return Err(Error::Structural(format!(
                            "simplex {s} enters before its facet {}",
                            self.simplices[fpos]
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Sub-filtration of simplices with value ≤ `epsilon`.
    pub fn truncate(&self, epsilon: f64) -> Filtration {
        Filtration {
            simplices: self.simplices.iter().filter(|s| s.value <= epsilon).cloned().collect(),
            kind: self.kind,
            point_count: self.point_count,
            max_dim: self.max_dim,
            epsilon_max: epsilon.min(self.epsilon_max),
        }
    }

    /// Simplices present at scale `epsilon`.
    pub fn at(&self, epsilon: f64) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().take_while(move |s| s.value <= epsilon)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.max_dim + 1];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }
}
