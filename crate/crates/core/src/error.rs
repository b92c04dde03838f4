use thiserror::Error;

use crate::poly::{PolyError, Var};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("module mismatch in {context}: expected [{expected}], found [{found}]")]
    ModuleMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("{context}: index {index} out of range 1..={len}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        len: usize,
    },
    #[error("{context}: variable {var} is not allowed here")]
    ForeignVariable { context: &'static str, var: Var },
    #[error("{0} is not a free parameter")]
    NotAParameter(Var),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("shape mismatch in {context}: {detail}")]
    Shape {
        context: &'static str,
        detail: String,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("refused: {precondition} does not hold")]
    Refused {
        precondition: &'static str,
        verdict: Box<Verdict>,
    },
    #[error("{0}")]
    NotInvertible(String),
}

impl Error {
    pub(crate) fn refused(precondition: &'static str, verdict: Verdict) -> Self {
        Error::Refused {
            precondition,
            verdict: Box::new(verdict),
        }
    }

    /// The verdict that caused a refusal, if this is one.
    pub fn refusal_verdict(&self) -> Option<&Verdict> {
        match self {
            Error::Refused { verdict, .. } => Some(verdict),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
