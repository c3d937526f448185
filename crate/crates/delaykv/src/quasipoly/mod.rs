//! Characteristic quasi-polynomials of the delayed wave model and the
//! machinery to locate their zeros: multi-branch Lambert W, rectangle
//! winding counts, and a grid-seeded Newton root finder whose output is
//! certified against the winding count.

mod lambert;
mod roots;
mod winding;

pub use lambert::lambert_w;
pub use roots::find_roots;
pub use winding::winding_count;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Characteristic function of one spatial mode,
/// `g(lambda) = lambda^2 + a lambda_k lambda + lambda_k e^(-lambda tau)`.
/// Its zeros are the eigenvalues contributed by that mode.
pub fn char_fn(lambda: Complex64, lambda_k: f64, p: &SystemParams) -> Complex64 {
    lambda * lambda + p.a * lambda_k * lambda + lambda_k * (-lambda * p.tau).exp()
}

/// Derivative of [`char_fn`] in lambda:
/// `2 lambda + a lambda_k - tau lambda_k e^(-lambda tau)`.
pub fn char_fn_deriv(lambda: Complex64, lambda_k: f64, p: &SystemParams) -> Complex64 {
    2.0 * lambda + p.a * lambda_k - p.tau * lambda_k * (-lambda * p.tau).exp()
}

/// Defining function of the continuous-spectrum locus,
/// `sigma(lambda) = a lambda + e^(-lambda tau)`. Mode spectra accumulate on
/// its zero set as lambda_k grows.
pub fn sigma_fn(lambda: Complex64, p: &SystemParams) -> Complex64 {
    p.a * lambda + (-lambda * p.tau).exp()
}

/// Derivative of [`sigma_fn`] in lambda: `a - tau e^(-lambda tau)`.
pub fn sigma_fn_deriv(lambda: Complex64, p: &SystemParams) -> Complex64 {
    Complex64::new(p.a, 0.0) - p.tau * (-lambda * p.tau).exp()
}

/// Which characteristic family a root came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootSource {
    /// Zero of a mode characteristic function; `index` is the 1-based mode
    /// index (0 when the mode was not taken from a mode set).
    Mode { index: usize, lambda_k: f64 },
    /// Point of the continuous-spectrum locus; `branch` is the Lambert W
    /// branch when the root came from the closed form.
    Sigma { branch: Option<i32> },
}

impl std::fmt::Display for RootSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootSource::Mode { index, .. } => write!(f, "mode[{index}]"),
            RootSource::Sigma { branch: Some(j) } => write!(f, "sigma[{j}]"),
            RootSource::Sigma { branch: None } => write!(f, "sigma"),
        }
    }
}

/// A located characteristic root with its certificate data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub lambda: Complex64,
    /// |f(lambda)| at the accepted point.
    pub residual: f64,
    pub source: RootSource,
}

/// Handle over the two characteristic families accepted by the root
/// machinery. Carries the parameters so contour routines can scale their
/// thresholds and enforce the window depth cap.
#[derive(Debug, Clone, Copy)]
pub struct CharFn {
    kind: CharKind,
    a: f64,
    tau: f64,
}

#[derive(Debug, Clone, Copy)]
enum CharKind {
    Mode { index: usize, lambda_k: f64 },
    Sigma,
}

impl CharFn {
    /// Mode characteristic function with a 1-based mode index used only to
    /// tag the roots.
    pub fn mode(p: &SystemParams, mode_index: usize, lambda_k: f64) -> Result<Self> {
        if !lambda_k.is_finite() || lambda_k <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue lambda_k = {lambda_k} must be finite and positive"
            )));
        }
        Ok(CharFn {
            kind: CharKind::Mode {
                index: mode_index,
                lambda_k,
            },
            a: p.a,
            tau: p.tau,
        })
    }

    /// Continuous-spectrum defining function.
    pub fn sigma(p: &SystemParams) -> Self {
        CharFn {
            kind: CharKind::Sigma,
            a: p.a,
            tau: p.tau,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let p = self.params();
        match self.kind {
            CharKind::Mode { lambda_k, .. } => char_fn(lambda, lambda_k, &p),
            CharKind::Sigma => sigma_fn(lambda, &p),
        }
    }

    pub fn deriv(&self, lambda: Complex64) -> Complex64 {
        let p = self.params();
        match self.kind {
            CharKind::Mode { lambda_k, .. } => char_fn_deriv(lambda, lambda_k, &p),
            CharKind::Sigma => sigma_fn_deriv(lambda, &p),
        }
    }

    /// Natural magnitude of the summed terms at `lambda`, used to turn
    /// absolute thresholds into relative ones. A value of the function far
    /// below this scale means cancellation down to roundoff.
    pub fn term_scale(&self, lambda: Complex64) -> f64 {
        let r = lambda.norm();
        let exp_mag = (-lambda.re * self.tau).exp();
        match self.kind {
            CharKind::Mode { lambda_k, .. } => (r * r)
                .max(self.a * lambda_k * r)
                .max(lambda_k * exp_mag)
                .max(f64::MIN_POSITIVE),
            CharKind::Sigma => (self.a * r).max(exp_mag).max(f64::MIN_POSITIVE),
        }
    }

    pub(crate) fn source_tag(&self) -> RootSource {
        match self.kind {
            CharKind::Mode { index, lambda_k } => RootSource::Mode { index, lambda_k },
            CharKind::Sigma => RootSource::Sigma { branch: None },
        }
    }

    fn params(&self) -> SystemParams {
        // xi plays no role in the characteristic functions; any valid value
        // yields the same evaluations.
        SystemParams {
            a: self.a,
            tau: self.tau,
            xi: 4.0 * self.tau / self.a,
            a_star: 1.0 / (1.0 / self.a + 2.0),
        }
    }
}

/// Closed rectangle in the complex plane with a seeding density for the
/// root finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Seed grid resolution per axis; at least 16.
    pub grid_n: usize,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, grid_n: usize) -> Result<Self> {
        let w = Window {
            re_min,
            re_max,
            im_min,
            im_max,
            grid_n,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.re_min, self.re_max, self.im_min, self.im_max] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "window bounds must be finite".into(),
                ));
            }
        }
        if self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidParameter(format!(
                "window [{}, {}] x [{}, {}] must have positive extent",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.grid_n < 16 {
            return Err(Error::InvalidParameter(format!(
                "window grid_n = {} must be at least 16",
                self.grid_n
            )));
        }
        Ok(())
    }

    /// Enforces the depth cap `re_min >= -WINDOW_DEPTH_CAP / tau`. Deeper
    /// windows make `e^(-lambda tau)` overflow the reliable range.
    pub fn validate_depth(&self, tau: f64) -> Result<()> {
        let floor = -crate::tol::WINDOW_DEPTH_CAP / tau;
        if self.re_min < floor {
            return Err(Error::InvalidParameter(format!(
                "window re_min = {} is below the depth cap {floor} for tau = {tau}",
                self.re_min
            )));
        }
        Ok(())
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        lambda.re >= self.re_min
            && lambda.re <= self.re_max
            && lambda.im >= self.im_min
            && lambda.im <= self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }
}

/// Default root window for a parameter set and mode family: deep enough for
/// the dominant roots, tall enough for the first delay chains and the modal
/// oscillation frequencies.
pub fn default_window(p: &SystemParams, max_lambda: f64) -> Window {
    let re_min = -(30.0_f64).min(10.0 / p.tau);
    let height = (4.0 * max_lambda.sqrt()).max(8.0 * std::f64::consts::PI / p.tau);
    Window {
        re_min,
        re_max: 2.0,
        im_min: -height,
        im_max: height,
        grid_n: 48,
    }
}

/// Validates a root residual target.
pub(crate) fn validate_tol(tol_val: f64) -> Result<()> {
    if !tol_val.is_finite() || tol_val <= 0.0 || tol_val > 1e-2 {
        return Err(Error::InvalidParameter(format!(
            "root residual target tol = {tol_val} must lie in (0, 1e-2]"
        )));
    }
    Ok(())
}

pub use crate::tol::ROOT_TOL as DEFAULT_ROOT_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> SystemParams {
        SystemParams::new(1.0, 1.0, None).unwrap()
    }

    #[test]
    fn char_fn_matches_hand_expansion_at_zero() {
        // g(0) = lambda_k for any parameters.
        let p = params();
        for lk in [1.0, std::f64::consts::PI * std::f64::consts::PI, 100.0] {
            let g = char_fn(Complex64::new(0.0, 0.0), lk, &p);
            assert_relative_eq!(g.re, lk, max_relative = 1e-15);
            assert_relative_eq!(g.im, 0.0);
        }
    }

    #[test]
    fn char_fn_matches_hand_value_at_real_point() {
        // a = 2, tau = 0.5, lambda_k = 3, lambda = -1:
        // g = 1 - 6 + 3 e^(0.5).
        let p = SystemParams::new(2.0, 0.5, None).unwrap();
        let g = char_fn(Complex64::new(-1.0, 0.0), 3.0, &p);
        assert_relative_eq!(g.re, 1.0 - 6.0 + 3.0 * 0.5_f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(g.im, 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = SystemParams::new(1.3, 0.7, None).unwrap();
        let lk = 5.0;
        let h = 1e-6;
        for lambda in [
            Complex64::new(0.3, 1.1),
            Complex64::new(-2.0, -4.0),
            Complex64::new(1.0, 0.0),
        ] {
            let fd = (char_fn(lambda + h, lk, &p) - char_fn(lambda - h, lk, &p)) / (2.0 * h);
            let d = char_fn_deriv(lambda, lk, &p);
            assert!(
                (fd - d).norm() < 1e-6 * (1.0 + d.norm()),
                "mode deriv at {lambda}"
            );

            let fd = (sigma_fn(lambda + h, &p) - sigma_fn(lambda - h, &p)) / (2.0 * h);
            let d = sigma_fn_deriv(lambda, &p);
            assert!(
                (fd - d).norm() < 1e-6 * (1.0 + d.norm()),
                "sigma deriv at {lambda}"
            );
        }
    }

    #[test]
    fn conjugate_symmetry_holds() {
        let p = SystemParams::new(0.8, 1.9, None).unwrap();
        let lk = 7.5;
        for lambda in [Complex64::new(0.4, 2.3), Complex64::new(-1.2, -0.7)] {
            let g = char_fn(lambda, lk, &p);
            let gc = char_fn(lambda.conj(), lk, &p);
            assert!((g.conj() - gc).norm() <= 1e-13 * g.norm().max(1.0));
            let s = sigma_fn(lambda, &p);
            let sc = sigma_fn(lambda.conj(), &p);
            assert!((s.conj() - sc).norm() <= 1e-13 * s.norm().max(1.0));
        }
    }

    #[test]
    fn sigma_points_are_not_mode_roots() {
        // At a sigma zero, g(lambda) = lambda^2, which only vanishes at the
        // origin, and sigma(0) = 1. Spot-check the identity.
        let p = params();
        let lambda = lambert_w(0, Complex64::new(-1.0, 0.0)).unwrap() / p.tau;
        assert!(sigma_fn(lambda, &p).norm() < 1e-12);
        let g = char_fn(lambda, 3.0, &p);
        assert!((g - lambda * lambda).norm() <= 1e-12 * g.norm().max(1.0));
        assert!(g.norm() > 0.1);
    }

    #[test]
    fn window_validation_rejects_bad_shapes() {
        assert!(Window::new(-1.0, 1.0, -1.0, 1.0, 16).is_ok());
        assert!(Window::new(1.0, -1.0, -1.0, 1.0, 16).is_err());
        assert!(Window::new(-1.0, 1.0, 1.0, 1.0, 16).is_err());
        assert!(Window::new(-1.0, 1.0, -1.0, 1.0, 8).is_err());
        assert!(Window::new(f64::NAN, 1.0, -1.0, 1.0, 16).is_err());
    }

    #[test]
    fn window_depth_cap_scales_with_tau() {
        let w = Window::new(-31.0, 1.0, -1.0, 1.0, 16).unwrap();
        assert!(w.validate_depth(1.0).is_err());
        assert!(w.validate_depth(0.5).is_ok());
        let deep = Window::new(-59.0, 1.0, -1.0, 1.0, 16).unwrap();
        assert!(deep.validate_depth(0.5).is_ok());
        let too_deep = Window::new(-61.0, 1.0, -1.0, 1.0, 16).unwrap();
        assert!(too_deep.validate_depth(0.5).is_err());
    }

    #[test]
    fn default_window_respects_depth_cap() {
        for tau in [0.05, 0.3, 1.0, 4.0] {
            let p = SystemParams::new(5.0, tau, None).unwrap();
            let w = default_window(&p, 100.0);
            assert!(w.validate().is_ok());
            assert!(w.validate_depth(tau).is_ok(), "tau = {tau}");
            assert!(w.im_max >= 4.0 * 10.0);
        }
    }

    #[test]
    fn source_tags_render_stably() {
        assert_eq!(
            RootSource::Mode {
                index: 3,
                lambda_k: 1.0
            }
            .to_string(),
            "mode[3]"
        );
        assert_eq!(
            RootSource::Sigma { branch: Some(-2) }.to_string(),
            "sigma[-2]"
        );
        assert_eq!(RootSource::Sigma { branch: None }.to_string(), "sigma");
    }
}
