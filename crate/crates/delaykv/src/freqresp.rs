//! Frequency-domain view of one mode: the transfer function
//! `H(lambda) = 1 / (lambda^2 + a lambda_k lambda + lambda_k e^(-lambda tau))`,
//! the explicit frequency beyond which its modulus obeys a `2 / omega^2`
//! tail bound, and imaginary-axis sweeps that either locate the supremum of
//! `|H(i omega)|` or certify that it is infinite because the sweep hit the
//! spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quasipoly::{char_fn, CharFn};
use crate::tol;

/// Relative floor, in units of the characteristic function's term scale,
/// below which a refined minimum of `|g|` is treated as an actual zero on
/// the axis.
const UNBOUNDED_REL: f64 = 1e-13;

/// Evaluates the mode transfer function `1 / g(lambda)`.
///
/// Points where `|g|` falls under the near-spectrum floor are rejected,
/// since the reciprocal there is dominated by roundoff in `g`.
pub fn transfer(lambda: Complex64, lambda_k: f64, p: &SystemParams) -> Result<Complex64> {
    if !lambda_k.is_finite() || lambda_k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue lambda_k = {lambda_k} must be finite and positive"
        )));
    }
    let g = char_fn(lambda, lambda_k, p);
    let modulus = g.norm();
    if modulus <= tol::NEAR_SPECTRUM_REL * (1.0 + lambda.norm_sqr()) {
        return Err(Error::NearSpectrum { lambda, modulus });
    }
    Ok(g.inv())
}

/// Frequency beyond which `|H(i omega)| <= 2 / omega^2`:
/// `a lambda_k + sqrt(a^2 lambda_k^2 + 2 lambda_k)`, the positive root of
/// `omega^2 - 2 a lambda_k omega - 2 lambda_k`.
pub fn tail_threshold(lambda_k: f64, p: &SystemParams) -> Result<f64> {
    if !lambda_k.is_finite() || lambda_k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue lambda_k = {lambda_k} must be finite and positive"
        )));
    }
    let al = p.a * lambda_k;
    Ok(al + (al * al + 2.0 * lambda_k).sqrt())
}

/// Samples of `|H(i omega)|` over a symmetric frequency grid.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Sample frequencies in ascending order.
    pub omegas: Vec<f64>,
    /// `|H(i omega)|` per sample; infinite where the sweep hit the
    /// spectrum.
    pub magnitudes: Vec<f64>,
    /// Supremum over the samples after peak refinement.
    pub sup_value: f64,
    /// Frequency attaining the supremum.
    pub sup_omega: f64,
    /// Set when the refined peak is an actual axis zero of the
    /// characteristic function, in which case `sup_value` is infinite.
    pub unbounded_at: Option<f64>,
}

/// Sweeps `|H(i omega)|` over `omega in [-omega_max, omega_max]` on a
/// log-dense symmetric grid with `2 n + 1` points including zero, then
/// sharpens the largest sample by golden-section search on `|g(i omega)|^2`
/// and inserts the refined frequency pair into the samples. A refined
/// minimum of `|g|` at the roundoff floor means an imaginary-axis root:
/// the supremum is then reported as infinite with the frequency recorded
/// in `unbounded_at`.
pub fn axis_sweep(
    p: &SystemParams,
    lambda_k: f64,
    omega_max: f64,
    n: usize,
) -> Result<SweepResult> {
    if !lambda_k.is_finite() || lambda_k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue lambda_k = {lambda_k} must be finite and positive"
        )));
    }
    if !omega_max.is_finite() || omega_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sweep limit omega_max = {omega_max} must be finite and positive"
        )));
    }
    if n < 64 {
        return Err(Error::InvalidParameter(format!(
            "sweep needs at least 64 grid points per side, got {n}"
        )));
    }
    let f = CharFn::mode(p, 0, lambda_k)?;

    let omega_min = omega_max * 1e-4;
    let ratio = (omega_max / omega_min).powf(1.0 / (n - 1) as f64);
    let positive = |i: usize| {
        if i + 1 == n {
            omega_max
        } else {
            omega_min * ratio.powi(i as i32)
        }
    };
    let mut omegas: Vec<f64> = Vec::with_capacity(2 * n + 1);
    for i in (0..n).rev() {
        omegas.push(-positive(i));
    }
    omegas.push(0.0);
    for i in 0..n {
        omegas.push(positive(i));
    }

    let magnitude_at = |omega: f64| -> f64 {
        let lambda = Complex64::new(0.0, omega);
        let g = f.eval(lambda);
        let modulus = g.norm();
        if modulus <= tol::NEAR_SPECTRUM_REL * (1.0 + lambda.norm_sqr()) {
            f64::INFINITY
        } else {
            modulus.recip()
        }
    };

    let mut magnitudes: Vec<f64> = omegas.iter().map(|&w| magnitude_at(w)).collect();
    if let Some(i) = magnitudes.iter().position(|m| m.is_infinite()) {
        let omega = omegas[i].abs();
        return Ok(SweepResult {
            omegas,
            magnitudes,
            sup_value: f64::INFINITY,
            sup_omega: omega,
            unbounded_at: Some(omega),
        });
    }

    let peak = argmax(&omegas, &magnitudes);
    let lo = omegas[peak.saturating_sub(1)];
    let hi = omegas[(peak + 1).min(omegas.len() - 1)];
    if hi > lo {
        let g_sq = |omega: f64| f.eval(Complex64::new(0.0, omega)).norm_sqr();
        let omega_hat = golden_min(g_sq, lo, hi).abs();
        let lambda_hat = Complex64::new(0.0, omega_hat);
        let g_hat = f.eval(lambda_hat).norm();
        if g_hat <= UNBOUNDED_REL * f.term_scale(lambda_hat) {
            insert_sorted(&mut omegas, &mut magnitudes, omega_hat, f64::INFINITY);
            insert_sorted(&mut omegas, &mut magnitudes, -omega_hat, f64::INFINITY);
            return Ok(SweepResult {
                omegas,
                magnitudes,
                sup_value: f64::INFINITY,
                sup_omega: omega_hat,
                unbounded_at: Some(omega_hat),
            });
        }
        let refined = g_hat.recip();
        insert_sorted(&mut omegas, &mut magnitudes, omega_hat, refined);
        if omega_hat > 0.0 {
            insert_sorted(&mut omegas, &mut magnitudes, -omega_hat, refined);
        }
    }

    let best = argmax(&omegas, &magnitudes);
    Ok(SweepResult {
        sup_value: magnitudes[best],
        sup_omega: omegas[best],
        unbounded_at: None,
        omegas,
        magnitudes,
    })
}

/// Index of the largest magnitude, preferring the nonnegative frequency of
/// a symmetric tie.
fn argmax(omegas: &[f64], magnitudes: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..magnitudes.len() {
        if magnitudes[i] > magnitudes[best]
            || (magnitudes[i] == magnitudes[best] && omegas[best] < 0.0 && omegas[i] >= 0.0)
        {
            best = i;
        }
    }
    best
}

fn insert_sorted(omegas: &mut Vec<f64>, magnitudes: &mut Vec<f64>, omega: f64, magnitude: f64) {
    let pos = omegas.partition_point(|&w| w < omega);
    omegas.insert(pos, omega);
    magnitudes.insert(pos, magnitude);
}

/// Golden-section minimizer on `[lo, hi]`, run to the floating-point width
/// limit of the bracket.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}
