//! Double-data-piling discriminant analysis for high-dimension
//! low-sample-size (HDLSS) binary classification under heterogeneous spiked
//! covariance models.
//!
//! The crate is organized in four layers:
//!
//! * [`model`] — population models (block-structured spike eigenvectors,
//!   per-class spike strengths and tail variances) and an `O(p·(n+m))`
//!   sampler that never materializes a `p×p` covariance matrix.
//! * [`geometry`] — all sample geometry derived from a training set via the
//!   `n×n` dual Gram matrix: eigenpairs of the within-class scatter, the
//!   maximal-data-piling (MDP) direction, the piling distance `κ`, the
//!   ridge / projected-ridge direction family, and tail-variance estimators.
//! * [`classifiers`] — the classification rules built on that geometry:
//!   MDP, bias-corrected MDP, (bias-corrected) projected ridge, and the
//!   data-splitting second-maximal-data-piling (SMDP) rules.
//! * [`limits`] — a theory oracle evaluating every closed-form asymptotic
//!   quantity (eigenvalue and eigenvector-angle limits, piling offsets,
//!   `κ`/`γ`/`υ₀` constants, the ridge-preference probability `ζ`)
//!   conditional on the true principal-component scores, for convergence
//!   testing of the sample quantities.

pub mod classifiers;
pub mod error;
pub mod geometry;
pub mod limits;
pub mod model;
pub mod seed;

pub use error::DpaError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DpaError>;
