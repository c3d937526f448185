//! System parameters and spatial mode sets.
//!
//! The model is a wave equation with interior damping `a B B* u'` and a
//! delayed damping term `B B* u(t - tau)`. Expanding in eigenfunctions of
//! `B B*` reduces it to one scalar delay equation per eigenvalue lambda_k:
//!
//! ```text
//! u_k'' + a lambda_k u_k' + lambda_k u_k(t - tau) = 0
//! ```

use crate::error::{Error, Result};

/// Validated parameter set for the damped delayed wave model.
///
/// `xi` weights the history term of the energy and must satisfy
/// `xi > 2 tau / a` strictly; `a_star = 1 / (1/a + xi/(2 tau))` is the
/// coefficient appearing in the dissipativity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub a: f64,
    pub tau: f64,
    pub xi: f64,
    pub a_star: f64,
}

impl SystemParams {
    /// Builds a validated parameter set. When `xi` is `None` it defaults to
    /// `4 tau / a`, twice the lower bound.
    pub fn new(a: f64, tau: f64, xi: Option<f64>) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "damping coefficient a = {a} must be finite and positive"
            )));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "delay tau = {tau} must be finite and positive"
            )));
        }
        let lower = 2.0 * tau / a;
        let xi = xi.unwrap_or(2.0 * lower);
        if !xi.is_finite() || xi <= lower {
            return Err(Error::InvalidParameter(format!(
                "energy weight xi = {xi} must exceed 2 tau / a = {lower}"
            )));
        }
        let a_star = 1.0 / (1.0 / a + xi / (2.0 * tau));
        Ok(SystemParams { a, tau, xi, a_star })
    }

    /// True when the delay does not exceed the damping coefficient, the
    /// regime in which every characteristic root has negative real part.
    pub fn threshold_satisfied(&self) -> bool {
        self.tau <= self.a
    }
}

/// Where a mode set came from; Dirichlet sets keep the interval length so
/// eigenfunctions can be evaluated later.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeOrigin {
    Dirichlet1d { length: f64 },
    Explicit,
}

/// Sorted positive eigenvalues of the spatial operator `B B*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    lambdas: Vec<f64>,
    origin: ModeOrigin,
}

impl ModeSet {
    /// Wraps explicit eigenvalues. They must be positive and finite; the
    /// stored set is sorted ascending.
    pub fn from_lambdas(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidParameter(
                "mode set must contain at least one eigenvalue".into(),
            ));
        }
        for &l in &lambdas {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalue lambda_k = {l} must be finite and positive"
                )));
            }
        }
        lambdas.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok(ModeSet {
            lambdas,
            origin: ModeOrigin::Explicit,
        })
    }

    /// Eigenvalues `(k pi / length)^2` for `k = 1..=k_max`, the Dirichlet
    /// Laplacian on an interval of the given length.
    pub fn dirichlet_1d(length: f64, k_max: usize) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interval length = {length} must be finite and positive"
            )));
        }
        if k_max == 0 {
            return Err(Error::InvalidParameter(
                "mode count k_max must be at least 1".into(),
            ));
        }
        let lambdas = (1..=k_max)
            .map(|k| {
                let w = k as f64 * std::f64::consts::PI / length;
                w * w
            })
            .collect();
        Ok(ModeSet {
            lambdas,
            origin: ModeOrigin::Dirichlet1d { length },
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn origin(&self) -> &ModeOrigin {
        &self.origin
    }

    /// Largest eigenvalue in the set.
    pub fn max_lambda(&self) -> f64 {
        *self.lambdas.last().expect("mode set is non-empty")
    }

    /// Eigenvalue for a 1-based mode index.
    pub fn lambda(&self, mode_index: usize) -> Result<f64> {
        if mode_index == 0 || mode_index > self.lambdas.len() {
            return Err(Error::InvalidParameter(format!(
                "mode index {mode_index} out of range 1..={}",
                self.lambdas.len()
            )));
        }
        Ok(self.lambdas[mode_index - 1])
    }

    /// L2-normalized eigenfunction `sqrt(2/length) sin(k pi x / length)` of
    /// a Dirichlet set, for a 1-based mode index. Explicit sets carry no
    /// spatial shape and return an error.
    pub fn eigenfunction(&self, mode_index: usize, x: f64) -> Result<f64> {
        self.lambda(mode_index)?;
        match self.origin {
            ModeOrigin::Dirichlet1d { length } => {
                let k = mode_index as f64;
                Ok((2.0 / length).sqrt() * (k * std::f64::consts::PI * x / length).sin())
            }
            ModeOrigin::Explicit => Err(Error::InvalidParameter(
                "explicit mode sets have no spatial eigenfunctions".into(),
            )),
        }
    }
}
