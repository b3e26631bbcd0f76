//! Error type shared across the crate.

use thiserror::Error;

/// All failure modes of model construction, geometry fitting, and the
/// classification / limit computations.
#[derive(Debug, Error)]
pub enum DpaError {
    /// A population model violates its structural invariants
    /// (overlapping blocks, non-orthogonal eigenvector patterns,
    /// inconsistent spike counts, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A request was inconsistent with the fitted objects
    /// (bad index counts, impossible split sizes, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A numerical degeneracy that the theory rules out almost surely but
    /// that can occur for adversarial inputs (zero piling component,
    /// coincident class means in 1-D LDA, ...).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// The ridge parameter hit (or came within tolerance of) a pole
    /// `α·p = -λ̂ᵢ` of the shrinkage factors.
    #[error("ridge parameter pole: α·p = {alpha_p} is within tolerance of -λ̂_{index}")]
    RidgePole {
        /// 1-based index of the offending sample eigenvalue.
        index: usize,
        /// The scaled ridge parameter `α·p`.
        alpha_p: f64,
    },

    /// I/O failure while reading a model configuration file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed model configuration file.
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
}
