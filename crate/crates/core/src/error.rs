use crate::digraph::VertexId;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("loop arc ({0}, {0})")]
    Loop(VertexId),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(VertexId, VertexId),
    #[error("vertex {vertex} out of range for digraph on {n} vertices")]
    OutOfRange { vertex: VertexId, n: usize },
    #[error("arc ({0}, {1}) is not present")]
    MissingArc(VertexId, VertexId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("vertex {vertex} has out-degree {degree} < {required}")]
    DegreeDeficit {
        vertex: VertexId,
        degree: usize,
        required: usize,
    },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid minor model at step {step}: {reason}")]
    InvalidModel { step: usize, reason: String },
    #[error("arc ({0}, {1}) is not contractible")]
    NotContractible(VertexId, VertexId),
    #[error("k-train oracle failed: {0}")]
    Oracle(String),
    #[error("instance too large for exhaustive check: {0}")]
    TooLarge(String),
    #[error("internal defect: {0}")]
    Defect(String),
    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
