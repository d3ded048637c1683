use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input parameter is outside its admissible range.
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// A postselection step accepted with zero (or non-finite) probability.
    #[error("success probability underflow in {stage}")]
    SuccessUnderflow { stage: String },

    /// The pass/fail indicator of a threshold scan has more than one crossing.
    #[error("non-monotone pass/fail indicator at F = {fidelity}: {detail}")]
    NonMonotone { fidelity: f64, detail: String },

    /// Two independent evaluation routes disagree.
    #[error("oracle discrepancy in {check}: max deviation {deviation:e}")]
    Discrepancy { check: String, deviation: f64 },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn underflow(stage: impl Into<String>) -> Self {
        Error::SuccessUnderflow {
            stage: stage.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
