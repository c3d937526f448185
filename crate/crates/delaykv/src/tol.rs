//! Centralized numerical tolerances and guard thresholds.
//!
//! Every routine that needs a hard-coded threshold reads it from here, so
//! the values stay consistent between the library, the test suite, and the
//! command-line tool.

/// Relative residual target for Lambert W: |w e^w - z| <= this * max(1, |z|).
pub const LAMBERT_RESIDUAL_REL: f64 = 1e-12;

/// Absolute residual bound accepted for closed-form continuous-spectrum roots.
pub const SIGMA_ROOT_RESIDUAL: f64 = 1e-10;

/// Default absolute residual target for polished characteristic roots.
pub const ROOT_TOL: f64 = 1e-9;

/// Dedupe radius for polished roots is DEDUPE_FACTOR * tol * (1 + |lambda|).
pub const DEDUPE_FACTOR: f64 = 10.0;

/// Margin around zero inside which a spectral abscissa gives no verdict.
pub const VERDICT_MARGIN: f64 = 1e-8;

/// Relative floor for |f| on a winding contour. A boundary sample below
/// this floor (times the local term scale) makes the window indeterminate.
pub const BOUNDARY_FLOOR_REL: f64 = 1e-11;

/// Near-spectrum guard for transfer-function evaluations: |g(lambda)| must
/// exceed this times (1 + |lambda|^2).
pub const NEAR_SPECTRUM_REL: f64 = 1e-14;

/// Hard cap on window depth: re_min must satisfy re_min * tau >= -this.
/// Deeper windows put e^(-lambda tau) beyond reliable evaluation.
pub const WINDOW_DEPTH_CAP: f64 = 30.0;

/// Integrator divergence cutoff on |u|.
pub const DIVERGENCE_LIMIT: f64 = 1e100;

/// Residual above which a decay-rate fit is flagged as poor.
pub const POOR_FIT_RESIDUAL: f64 = 0.1;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::assertions_on_constants)]
    fn tolerances_are_positive_and_ordered() {
        assert!(LAMBERT_RESIDUAL_REL > 0.0);
        assert!(SIGMA_ROOT_RESIDUAL > LAMBERT_RESIDUAL_REL);
        assert!(ROOT_TOL > SIGMA_ROOT_RESIDUAL);
        assert!(NEAR_SPECTRUM_REL < LAMBERT_RESIDUAL_REL);
        assert!(BOUNDARY_FLOOR_REL > NEAR_SPECTRUM_REL);
        assert!(DEDUPE_FACTOR >= 1.0);
        assert!(WINDOW_DEPTH_CAP > 0.0);
        assert!(DIVERGENCE_LIMIT > 1e50);
    }
}
