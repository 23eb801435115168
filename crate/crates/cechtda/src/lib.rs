//! File formats, pipeline stages and the `cechtda` command line on top of
//! [`cechtda_core`].

pub mod config;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod plot;
pub mod stats;

pub use cechtda_core as core;
pub use config::PipelineConfig;
pub use error::{PipelineError, Result};
