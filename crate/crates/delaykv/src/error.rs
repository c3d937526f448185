//! Error type shared across the library.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes for parameter validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument violates its documented constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A zero of the characteristic function sits on or too close to the
    /// window boundary, so the winding count cannot certify the enclosed
    /// root count.
    #[error("indeterminate window: {0}")]
    IndeterminateWindow(String),

    /// Polishing recovered a different number of roots than the
    /// argument-principle certificate requires.
    #[error("incomplete root capture: found {found} roots, winding count {expected}")]
    IncompleteRootCapture { found: usize, expected: usize },

    /// An iteration failed to reach its residual target.
    #[error("no convergence in {context}: residual {residual:.3e} at {last}")]
    NonConvergence {
        context: String,
        last: Complex64,
        residual: f64,
    },

    /// The integrator state left the representable range.
    #[error("trajectory diverged at t = {t:.6}: |u| exceeded {limit:.1e}")]
    Divergence { t: f64, limit: f64 },

    /// A transfer-function evaluation point is too close to the spectrum.
    #[error("near-spectrum evaluation at lambda = {lambda}: |denominator| = {modulus:.3e}")]
    NearSpectrum { lambda: Complex64, modulus: f64 },

    /// A certified analytical statement disagrees with the numerics.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical
    /// routine giving up. Used by callers to pick exit codes.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter(_))
    }
}
