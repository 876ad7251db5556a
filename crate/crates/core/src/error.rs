//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("form degree {degree} exceeds fiber dimension {dim}")]
    RankOverflow { degree: usize, dim: usize },

    #[error("interior product requires degree >= 1")]
    DegreeZero,

    #[error("tensor is not alternating (residual {residual:.3e})")]
    NotAlternating { residual: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("metric is not symmetric positive definite")]
    MetricNotSpd,

    #[error("{what} is not isotropy-invariant (residual {residual:.3e})")]
    NotInvariant { what: String, residual: f64 },

    #[error("subspaces do not span the fiber (total rank {rank} of {dim})")]
    NotSpanning { rank: usize, dim: usize },

    #[error("{op} postcondition {which} failed (residual {residual:.3e})")]
    Postcondition {
        op: &'static str,
        which: &'static str,
        residual: f64,
    },

    #[error("refused at gate `{gate}`: {reason}")]
    Refused { gate: String, reason: String },

    #[error("square root not representable in exact arithmetic")]
    SqrtUnrepresentable,

    #[error("no solution found: {summary}")]
    NoSolution { summary: String },

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error("unknown catalog model `{0}`")]
    UnknownModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl GeometryError {
    /// Name of the refusal gate, when this error is a gate refusal.
    pub fn gate(&self) -> Option<&str> {
        match self {
            GeometryError::Refused { gate, .. } => Some(gate),
            _ => None,
        }
    }
}
