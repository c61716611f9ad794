//! Constructive d-majorization on finite-dimensional spaces.
//!
//! Vector and matrix majorization tests, the polytope of vectors d-majorized
//! by a given one, thermal dissipation on the probability simplex, steering
//! for the permutation-plus-dissipation toy model, and a few quantum-channel
//! and C-numerical-range diagnostics.

pub mod channels;
pub mod cnr;
pub mod dissipation;
pub mod linalg;
pub mod lp;
pub mod majorize;
pub mod par;
pub mod polytope;
pub mod reach;
pub mod sample;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use linalg::{ComplexMatrix, Permutation, RealMatrix};
pub use par::Exec;
