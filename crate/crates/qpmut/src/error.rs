//! Error taxonomy.
//!
//! Two families matter to callers: input/validation problems (CLI exit code 1)
//! and mathematical precondition failures (CLI exit code 2).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpError {
    /// Malformed or inconsistent input (bad JSON, unknown labels, invalid table…).
    #[error("invalid input: {0}")]
    Validation(String),

    /// Mutation at `vertex` is undefined because a 2-cycle passes through it.
    #[error("mutation undefined at vertex {vertex}: a 2-cycle passes through it")]
    MutationUndefinedAtVertex { vertex: usize },

    /// The potential's quadratic image Ξ₂ is not Z-freely generated, so no
    /// trivial ⊕ reduced splitting exists.
    #[error("potential is not splittable: {details}")]
    NotSplittable { details: String },

    /// A randomized search ran out of trials.
    #[error("search exhausted {trials} trials without a witness")]
    ExhaustedTrials { trials: usize, report: String },
}

impl QpError {
    /// CLI exit code classification.
    pub fn exit_code(&self) -> i32 {
        match self {
            QpError::Validation(_) => 1,
            _ => 2,
        }
    }
}
