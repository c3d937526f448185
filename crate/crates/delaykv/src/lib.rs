//! Numerical laboratory for a wave equation with delayed Kelvin-Voigt damping.
//!
//! The object of study is the scalar family of delay equations
//! `u'' + a lambda_k u' + lambda_k u(t - tau) = 0` obtained by expanding the
//! damped wave equation in spatial modes, together with the locus
//! `a lambda + e^(-lambda tau) = 0` that the mode spectra accumulate on.
//! The crate verifies the stability threshold `tau <= a` numerically from
//! several independent directions:
//!
//! - [`quasipoly`]: characteristic functions, multi-branch Lambert W,
//!   argument-principle winding counts, and certified root capture.
//! - [`spectrum`]: per-mode spectra, closed-form continuous-spectrum roots,
//!   spectral abscissas, verdicts, instability witnesses, and region maps
//!   over the `(a, tau)` plane.
//! - [`simulate`]: method-of-steps time integration, modal energy traces,
//!   decay-rate fits, and the dissipativity inequality check.
//! - [`freqresp`]: modal transfer functions and imaginary-axis sweeps.

pub mod error;
pub mod freqresp;
pub mod params;
pub mod quasipoly;
pub mod simulate;
pub mod spectrum;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{ModeOrigin, ModeSet, SystemParams};
