//! Dominant-frequency activity matching for phone + watch motion streams.
//!
//! This crate holds the pure algorithmic part of the pipeline and builds
//! without `std` (it needs `alloc`):
//!
//! - [`signal`]: sensor streams, moving-average filtering, sliding windows.
//! - [`spectral`]: FFT magnitude spectra, per-bin dominant frequencies and
//!   the nine bucket hash functions `H0..H8`.
//! - [`dfam`]: window signatures, equalized signature models, scoring and
//!   max-aggregate classification.
//! - [`features`]: time/frequency feature vectors for the baseline classifiers.
//! - [`baselines`]: Gaussian naive Bayes, CART decision tree, random forest
//!   and k-nearest-neighbours.
//! - [`eval`]: k-fold / leave-one-subject-out splits, confusion matrices and
//!   a fold-level evaluation driver.
//! - [`hcar`]: the two-state (movement gate, distraction check) detector.
//!
//! File formats, CSV ingestion, timing and the command line live in the
//! companion `dfam` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod activity;
pub mod baselines;
pub mod dfam;
pub mod error;
pub mod eval;
pub mod features;
pub mod hcar;
mod math;
pub mod signal;
pub mod spectral;

pub use activity::{ActivityKind, ActivityLabel, Dataset, Placement, Recording};
pub use error::{Error, Result};
