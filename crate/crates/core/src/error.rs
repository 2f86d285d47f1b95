use serde::Serialize;
use thiserror::Error;

use crate::subset::Subset;

pub type Result<T> = std::result::Result<T, Error>;

/// Indices that make a failed check reproducible.
///
/// Point indices always refer to the ambient metric space, atom indices to the
/// measure space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    None,
    Point { x: usize },
    Pair { x: usize, y: usize },
    PairAtom { x: usize, y: usize, atom: usize },
    PairSubset { x: usize, y: usize, subset: Subset },
    Subset { subset: Subset },
    Subsets { a: Subset, b: Subset },
    PointSubsets { x: usize, check: String, a: Subset, b: Subset },
    Vector { index: usize, subset: Subset },
    Indices { indices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("empty domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition failed: {message}")]
    Precondition { message: String, witness: Witness },
    #[error("hypothesis failed: {message}")]
    Hypothesis { message: String, witness: Witness },
    #[error("enumeration limit exceeded: {0}")]
    Resource(String),
    #[error("numerical failure: {message}")]
    Numeric { message: String, estimates: Vec<f64> },
}

impl Error {
    pub(crate) fn precondition(message: impl Into<String>, witness: Witness) -> Self {
        Error::Precondition { message: message.into(), witness }
    }

    pub(crate) fn hypothesis(message: impl Into<String>, witness: Witness) -> Self {
        Error::Hypothesis { message: message.into(), witness }
    }

    pub(crate) fn numeric(message: impl Into<String>, estimates: Vec<f64>) -> Self {
        Error::Numeric { message: message.into(), estimates }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Error::Precondition { witness, .. } | Error::Hypothesis { witness, .. } => Some(witness),
            _ => None,
        }
    }
}
