//! Topological feature extraction for multi-channel ECG.
//!
//! The pipeline turns a recording into a trial matrix, embeds the trials as a
//! low-dimensional point cloud, builds a Čech filtration whose simplices are
//! certified by minimal enclosing balls, reduces it to persistence diagrams and
//! summarizes those as Betti curves, persistent entropy and fixed-length
//! feature vectors for the classifiers in [`ml`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `cechtda` companion crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod complex;
pub mod embedding;
mod error;
pub mod ingest;
pub mod ml;
pub mod persistence;

mod num;

pub use error::{Error, Result};
