//! Community detection in degree-corrected block models.
//!
//! Sampling, spectral initialization with weighted k-medians, refinement by
//! normalized neighbor counts, exact misclassification losses, error
//! exponents, exhaustive oracles for small problems, a two-point testing lab
//! and a simulation harness.

pub mod assignment;
pub mod error;
pub mod graph;
pub mod info;
pub mod io;
pub mod kmedians;
pub mod linalg;
pub mod loss;
pub mod model;
pub mod oracles;
pub mod refine;
pub mod rng;
pub mod spectral;
pub mod harness;
pub mod testing;

pub use error::{Error, Result};
pub use graph::{AdjacencyMatrix, LabelVector};
