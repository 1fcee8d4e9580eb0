//! Endmember extraction from hyperspectral matrices with the Hottopixx LP
//! model.
//!
//! The pipeline reduces the data matrix with a truncated SVD, solves the
//! Hottopixx model by row and column expansion (a column generation scheme
//! whose restricted optima are certified globally optimal by duality), and
//! picks `r` columns from the diagonal of the solution with clustering
//! postprocessing. Data generation, SPA, abundance estimation and MRSA
//! evaluation round out the toolkit.

pub mod index_set;
pub mod linalg;
pub mod baselines;
pub mod cli;
pub mod datagen;
pub mod evalkit;
pub mod lp;
pub mod model;
pub mod postprocess;
pub mod rce;

pub use index_set::IndexSet;
pub use linalg::DenseMatrix;
