//! Evaluation: MRSA matching against references, simplex-constrained
//! abundance estimation, and neighbourhood-density filtering of isolated
//! pixels.

mod abundance;
mod density;
mod export;
mod matching;

pub use abundance::{
    abundance, abundance_objective, abundance_with_dictionary, AbundanceOptions, AbundanceResult,
};
pub use density::{density_histogram, filter_isolated, kept_indices, neighborhood_density, DensityProfile};
pub use export::write_pgm;
pub use matching::{assign_exhaustive, assign_hungarian, match_mrsa, mrsa_cost, MatchReport, EXHAUSTIVE_MAX};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bad parameter: {0}")]
    Parameter(String),
}
