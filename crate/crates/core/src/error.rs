use thiserror::Error;

use crate::cycleset::Cell;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size {n} exceeds the limit of {max}")]
    SizeLimitExceeded { n: usize, max: usize },
    #[error("cell {0} has an empty domain")]
    EmptyDomain(Cell),
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("malformed matrix: {0}")]
    Shape(String),
    #[error("cannot parse cycle notation {0:?}")]
    CycleNotation(String),
    #[error("{0:?} is not a partition")]
    InvalidPartition(Vec<usize>),
    #[error("refinement leaves no consistent permutation")]
    InconsistentRefinement,
    #[error("cell {0} has zero or several true indicators")]
    MalformedModel(Cell),
    #[error("instance does not match: {0}")]
    ShapeMismatch(String),
    #[error("complete checks run without a budget")]
    BudgetOnCompleteCheck,
    #[error("permutation is not a witness of non-minimality")]
    NotAWitness,
    #[error("clause is not unit under the current partial cycle set")]
    NotPropagating,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
