//! Points of `V_n`, the `GL(n)` and `gl(n)` actions on them, the Hermitian
//! metric, associativity, direct sums, JSON I/O and the named catalog.

pub mod catalog;
mod json;
mod tensor;

use thiserror::Error;

pub use catalog::CatalogEntry;
pub use json::{parse_json, to_json, to_json_value, JsonAlgebra, JsonTerm};
pub use tensor::{AlgebraTensor, ASSOC_TOL, COND_WARN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero tensor has no projective class")]
    ZeroTensor,
    #[error("group element is singular")]
    SingularMatrix,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("non-finite structure constant")]
    NonFinite,
    #[error("index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange { dim: usize, index: (usize, usize, usize) },
    #[error("duplicate term for (i, j, k) = {0:?}")]
    DuplicateTerm((usize, usize, usize)),
    #[error("malformed algebra JSON: {0}")]
    Json(String),
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("algebra is not associative (max associator {0:.2e})")]
    NotAssociative(f64),
}
