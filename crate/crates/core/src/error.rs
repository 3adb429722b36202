use thiserror::Error;

use crate::fock::ModeId;

pub type Result<T> = std::result::Result<T, TfdError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfdError {
    #[error("mode {0} has no cutoff")]
    MissingMode(ModeId),

    #[error("partner modes {hat} (cutoff {hat_cutoff}) and {tilde} (cutoff {tilde_cutoff}) must share a cutoff")]
    MismatchedPartnerCutoff {
        hat: ModeId,
        tilde: ModeId,
        hat_cutoff: usize,
        tilde_cutoff: usize,
    },

    #[error("occupation {occupation} of mode {mode} exceeds cutoff {cutoff}")]
    OccupationOutOfRange {
        mode: ModeId,
        occupation: usize,
        cutoff: usize,
    },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("operands are defined on different bases")]
    BasisMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("expression already contains tilde mode {0}")]
    ExpressionContainsTildeMode(ModeId),

    #[error("{hat} and {tilde} are not a hat/tilde partner pair")]
    NotAPartnerPair { hat: ModeId, tilde: ModeId },

    #[error("spectrum has {len} levels but the mode holds only {capacity}")]
    SpectrumTooLong { len: usize, capacity: usize },

    #[error("operator acts on mode {0}, expected only the hat mode")]
    OperatorTouchesTildeSector(ModeId),

    #[error("series did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis dimension {dim} exceeds the guard {max}")]
    DimensionGuard { dim: usize, max: usize },
}

impl TfdError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        TfdError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
