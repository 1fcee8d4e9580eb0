//! Synthetic and semi-real datasets, plus matrix and index-set files.

mod io;
mod semireal;
mod synthetic;

pub use io::{
    decode_dmat, encode_dmat, format_csv, parse_csv, read_indices, read_matrix, write_atomic,
    write_indices, write_matrix,
};
pub use semireal::{build_semireal, toy_scene, SemirealBasis, SemirealInstance, ToyScene};
pub use synthetic::{gen_synthetic, noise_grid, scale_to_l1, SyntheticInstance};

use thiserror::Error;

use crate::evalkit::EvalError;
use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid dimensions: {0}")]
    Dims(String),
    #[error("references {reference} and an earlier one both map to column {column}")]
    DuplicateEndmember { reference: usize, column: usize },
    #[error("not a DMAT file (bad magic)")]
    BadMagic,
    #[error("unsupported DMAT version {0}")]
    UnsupportedVersion(u32),
    #[error("DMAT payload has {got} bytes, expected {expected}")]
    Truncated { expected: usize, got: usize },
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
