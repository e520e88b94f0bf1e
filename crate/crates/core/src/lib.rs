//! Dual geometry of Laplacian eigenfunctions.
//!
//! Eigenfunctions are compared through the heat semigroup: two functions are
//! similar when the pointwise product survives diffusion at the time scale
//! set by their eigenvalues. The pairwise similarities form an affinity
//! matrix whose leading eigenvectors place each eigenfunction as a point in
//! a low-dimensional landscape.

pub mod affinity;
pub mod config;
pub mod error;
pub mod experiment;
pub mod graphs;
pub mod io;
pub mod landscape;
pub mod query;
pub mod spectra;
pub mod svg;

pub use error::{Error, Result};
