//! Deletion/contraction graph invariants for graphs carrying flags
//! (half-edges), from abstract graphs through ribbon graphs to rank-3
//! weakly-colored stranded graphs.
//!
//! The crate is organised as a tower:
//!
//! - [`poly`] — exact sparse Laurent polynomial arithmetic the invariants
//!   are computed in;
//! - [`simple`] — abstract graphs with flags, the flag-extended Tutte
//!   polynomial and the classic Tutte polynomial;
//! - [`ribbon`] — ribbon graphs with flags, the extended Bollobás–Riordan
//!   polynomial and its pinched variant;
//! - [`stranded`] — rank-3 stranded graphs (colored tensor graphs and their
//!   contractions), cell structure, boundary, classification of edges;
//! - [`invariant`] — the seven-variable polynomial of stranded graphs, its
//!   reductions, the multivariate form and the recursive evaluator;
//! - [`verify`] — randomized structural/recurrence suites with shrinking;
//! - [`json`] — the on-disk graph interchange format.

pub mod invariant;
pub mod json;
pub mod poly;
pub mod ribbon;
pub mod simple;
pub mod stranded;
mod util;
pub mod verify;

/// Errors surfaced across the crate boundary.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input file or expression.
    #[error("parse error: {0}")]
    Parse(String),
    /// An operation was asked of a graph family that does not support it.
    #[error("graph family mismatch: {0}")]
    FamilyMismatch(String),
    /// Bad operation input: unknown ids, clashing id spaces, contraction of
    /// a non-trivial self-loop, and the like.
    #[error("invalid operation: {0}")]
    Invalid(String),
    /// An internal structural invariant failed to hold; never expected.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
