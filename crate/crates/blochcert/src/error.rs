//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

/// Errors produced by certification, solving, and bound evaluation.
///
/// Diagnostics are carried as `f64` regardless of the scalar type the
/// computation ran with, so the enum stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A NaN or infinity reached a public operation.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// The derivative at the requested expansion center is (numerically) zero.
    #[error("degenerate center: |f'(b)| = {modulus:e} below threshold {threshold:e}")]
    DegenerateCenter { modulus: f64, threshold: f64 },

    /// A polynomial that must satisfy f(0) = 0, f'(0) = 1 does not.
    #[error("polynomial not normalized: f(0) = {at_zero:e}, |f'(0) - 1| = {derivative_defect:e}")]
    NotNormalized { at_zero: f64, derivative_defect: f64 },

    /// Fixed-point iteration exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },

    /// An iterate left the certified domain.
    #[error("iterate escaped the domain: |z - center| = {distance:e} > {limit:e}")]
    DomainEscape { distance: f64, limit: f64 },

    /// A grid search found no feasible cell.
    #[error("search failed: {0}")]
    SearchFailure(String),

    /// Input data (JSON fixture, CLI literal) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<V> = std::result::Result<V, Error>;
