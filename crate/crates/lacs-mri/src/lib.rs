//! Reference-based adaptive-weighted compressed-sensing MRI reconstruction
//! and its comparison baselines, with a benchmark harness reproducing the
//! sampling-density, sparsifier and grayscale-correction experiments at
//! desk scale.
//!
//! The acquisition model is line-based: full rows of the centered 2D
//! spectrum are sampled without replacement over several rounds, the
//! sampling density is rebuilt between rounds from the current estimate
//! and a prior reference scan, and reconstruction solves a weighted
//! objective that mixes transform sparsity with similarity to the
//! reference.

pub mod bench;
pub mod error;
pub mod grayscale;
pub mod model;
pub mod recon;
pub mod sampling;
pub mod transforms;

pub use error::{Error, Result};
