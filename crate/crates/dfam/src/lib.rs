//! File formats, dataset loading, synthetic corpora, benchmarking and the
//! command line around [`dfam_core`].

#![forbid(unsafe_code)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod manifest;
pub mod model_file;
pub mod output;
pub mod runner;
pub mod stream_csv;
pub mod synth;

pub use dfam_core;
pub use error::{Error, Result};
