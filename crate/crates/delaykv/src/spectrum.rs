//! Spectral objects assembled from the root machinery: per-mode spectra,
//! closed-form continuous-spectrum roots, spectral abscissas with the
//! attaining root, stability verdicts, instability witnesses on the
//! marginal curve, region maps over the (a, tau) plane, and the singular
//! sequence residual that links mode spectra to the continuous spectrum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{ModeSet, SystemParams};
use crate::quasipoly::{
    char_fn, find_roots, lambert_w, sigma_fn, CharFn, Root, RootSource, Window,
};
use crate::tol;

/// Characteristic roots of one mode inside a window.
#[derive(Debug, Clone)]
pub struct ModeSpectrum {
    pub mode_index: usize,
    pub lambda_k: f64,
    pub window: Window,
    pub roots: Vec<Root>,
    /// Largest real part over the captured roots; negative infinity when
    /// the window contains none.
    pub abscissa: f64,
}

/// Finds the characteristic roots of mode `mode_index` (1-based) in `w`.
pub fn mode_spectrum(
    p: &SystemParams,
    modes: &ModeSet,
    mode_index: usize,
    w: &Window,
    tol_abs: f64,
) -> Result<ModeSpectrum> {
    let lambda_k = modes.lambda(mode_index)?;
    let f = CharFn::mode(p, mode_index, lambda_k)?;
    let roots = find_roots(&f, w, tol_abs)?;
    let abscissa = roots
        .iter()
        .map(|r| r.lambda.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ModeSpectrum {
        mode_index,
        lambda_k,
        window: *w,
        roots,
        abscissa,
    })
}

/// Closed-form continuous-spectrum roots `lambda_j = W_j(-tau/a) / tau` for
/// branches `j = -n_branches ..= n_branches`, each validated against the
/// defining function.
pub fn sigma_spectrum(p: &SystemParams, n_branches: u32) -> Result<Vec<Root>> {
    let z = Complex64::new(-p.tau / p.a, 0.0);
    let n = n_branches as i32;
    let mut roots = Vec::with_capacity(2 * n_branches as usize + 1);
    for branch in -n..=n {
        let lambda = lambert_w(branch, z)? / p.tau;
        let residual = sigma_fn(lambda, p).norm();
        if residual > tol::SIGMA_ROOT_RESIDUAL {
            return Err(Error::Inconsistency(format!(
                "sigma root from branch {branch} has residual {residual:.3e} \
                 above {:.1e}",
                tol::SIGMA_ROOT_RESIDUAL
            )));
        }
        roots.push(Root {
            lambda,
            residual,
            source: RootSource::Sigma {
                branch: Some(branch),
            },
        });
    }

    // Distinct branches must give distinct points, except within the
    // collision neighborhood of the branch point tau/a = 1/e where the
    // principal pair legitimately merges.
    let near_branch_point = (std::f64::consts::E * z + 1.0).norm() < 1e-6;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let d = (roots[i].lambda - roots[j].lambda).norm();
            if d < 1e-9 * (1.0 + roots[i].lambda.norm()) && !near_branch_point {
                return Err(Error::Inconsistency(format!(
                    "sigma roots {} and {} coincide at {}",
                    roots[i].source, roots[j].source, roots[i].lambda
                )));
            }
        }
    }
    Ok(roots)
}

/// Largest real part over every mode spectrum in `w` plus the closed-form
/// continuous-spectrum roots, together with the root attaining it.
pub fn spectral_abscissa(
    p: &SystemParams,
    modes: &ModeSet,
    w: &Window,
    tol_abs: f64,
    n_branches: u32,
) -> Result<(f64, Root)> {
    let mut best: Option<Root> = None;
    for k in 1..=modes.len() {
        let spec = mode_spectrum(p, modes, k, w, tol_abs)?;
        for r in spec.roots {
            if best.is_none_or(|b| r.lambda.re > b.lambda.re) {
                best = Some(r);
            }
        }
    }
    for r in sigma_spectrum(p, n_branches)? {
        if best.is_none_or(|b| r.lambda.re > b.lambda.re) {
            best = Some(r);
        }
    }
    match best {
        Some(root) => Ok((root.lambda.re, root)),
        None => Err(Error::Inconsistency(
            "no characteristic or continuous-spectrum root was captured".into(),
        )),
    }
}

/// Outcome of a stability decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// The abscissa sits inside the verdict margin around zero.
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Stable => write!(f, "stable"),
            Verdict::Unstable => write!(f, "unstable"),
            Verdict::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Stability decision with its provenance.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// True when `tau <= a`, in which case stability holds analytically
    /// and the numerics only cross-check it.
    pub certified: bool,
    pub abscissa: f64,
    pub dominant: Root,
}

/// Decides stability for a parameter set over a window.
///
/// When `tau <= a` the verdict is certified stable; a numerical abscissa at
/// or above the verdict margin then aborts with an inconsistency error
/// instead of contradicting the analysis silently. Otherwise the verdict
/// follows the sign of the abscissa outside the margin.
pub fn stability_verdict(
    p: &SystemParams,
    modes: &ModeSet,
    w: &Window,
    tol_abs: f64,
    n_branches: u32,
) -> Result<StabilityReport> {
    let (abscissa, dominant) = spectral_abscissa(p, modes, w, tol_abs, n_branches)?;
    let certified = p.threshold_satisfied();
    if certified {
        if abscissa >= tol::VERDICT_MARGIN {
            return Err(Error::Inconsistency(format!(
                "tau = {} <= a = {} guarantees stability, but the computed \
                 abscissa is {abscissa:.6e} at {}",
                p.tau, p.a, dominant.lambda
            )));
        }
        return Ok(StabilityReport {
            verdict: Verdict::Stable,
            certified,
            abscissa,
            dominant,
        });
    }
    let verdict = if abscissa < -tol::VERDICT_MARGIN {
        Verdict::Stable
    } else if abscissa > tol::VERDICT_MARGIN {
        Verdict::Unstable
    } else {
        Verdict::Indeterminate
    };
    Ok(StabilityReport {
        verdict,
        certified,
        abscissa,
        dominant,
    })
}

/// A point on the marginal curve: for a < tau produced this way, the mode
/// characteristic function has the purely imaginary root `i y`.
#[derive(Debug, Clone, Copy)]
pub struct InstabilityPair {
    pub lambda_k: f64,
    pub theta: f64,
    pub y: f64,
    pub a: f64,
    pub tau: f64,
    /// |g(i y)| under the constructed parameters.
    pub residual: f64,
}

/// Constructs parameters `(a, tau)` with `a < tau` for which mode
/// `lambda_k` has the marginal root `i y`:
/// `y = sqrt(lambda_k cos theta)`, `a = sin(theta) / y`,
/// `tau = theta / y`, for `theta` strictly inside `(0, pi/2)`.
pub fn instability_pair(lambda_k: f64, theta: f64) -> Result<InstabilityPair> {
    if !lambda_k.is_finite() || lambda_k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue lambda_k = {lambda_k} must be finite and positive"
        )));
    }
    if !theta.is_finite() || theta <= 0.0 || theta >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::InvalidParameter(format!(
            "angle theta = {theta} must lie strictly inside (0, pi/2)"
        )));
    }
    let y = (lambda_k * theta.cos()).sqrt();
    let a = theta.sin() / y;
    let tau = theta / y;
    let p = SystemParams::new(a, tau, None)?;
    let residual = char_fn(Complex64::new(0.0, y), lambda_k, &p).norm();
    let pair = InstabilityPair {
        lambda_k,
        theta,
        y,
        a,
        tau,
        residual,
    };
    debug_assert!(pair.a < pair.tau);
    Ok(pair)
}

impl InstabilityPair {
    /// The marginal frequency through the explicit radical
    /// `y = sqrt((-a^2 lambda_k^2 + sqrt(a^4 lambda_k^4 + 4 lambda_k^2))/2)`,
    /// an independent route to the same value.
    pub fn y_closed_form(&self) -> f64 {
        let a2l2 = self.a * self.a * self.lambda_k * self.lambda_k;
        (((a2l2 * a2l2 + 4.0 * self.lambda_k * self.lambda_k).sqrt() - a2l2) / 2.0).sqrt()
    }

    /// System parameters at the witness point with the default energy
    /// weight.
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.a, self.tau, None)
    }
}

/// One cell of a region map.
#[derive(Debug, Clone, Copy)]
pub struct RegionCell {
    pub a: f64,
    pub tau: f64,
    /// Negative infinity when the window captured no root; NaN when the
    /// cell failed.
    pub abscissa: f64,
    pub verdict: Verdict,
}

/// Stability chart over an (a, tau) grid.
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub a_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
    /// Row-major over tau (outer) then a (inner).
    pub cells: Vec<RegionCell>,
}

impl RegionMap {
    pub fn cell(&self, a_index: usize, tau_index: usize) -> &RegionCell {
        &self.cells[tau_index * self.a_axis.len() + a_index]
    }
}

/// Evaluates the stability verdict on every (a, tau) grid cell.
///
/// Each cell re-derives `xi = 4 tau / a` and clamps the window depth to the
/// cap for its own delay. Cells run concurrently; failures inside a cell
/// (indeterminate windows, capture mismatches) degrade that cell to an
/// indeterminate verdict with a NaN abscissa rather than aborting the map.
pub fn region_map(
    a_axis: &[f64],
    tau_axis: &[f64],
    modes: &ModeSet,
    w: &Window,
    tol_abs: f64,
    n_branches: u32,
) -> Result<RegionMap> {
    if a_axis.is_empty() || tau_axis.is_empty() {
        return Err(Error::InvalidParameter(
            "region axes must be non-empty".into(),
        ));
    }
    for &v in a_axis.iter().chain(tau_axis) {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "region axis value {v} must be finite and positive"
            )));
        }
    }
    w.validate()?;

    let cells: Vec<RegionCell> = tau_axis
        .par_iter()
        .flat_map_iter(|&tau| a_axis.iter().map(move |&a| (a, tau)))
        .map(|(a, tau)| {
            let result = SystemParams::new(a, tau, None).and_then(|p| {
                let mut cell_w = *w;
                cell_w.re_min = cell_w.re_min.max(-tol::WINDOW_DEPTH_CAP / tau);
                stability_verdict(&p, modes, &cell_w, tol_abs, n_branches)
            });
            match result {
                Ok(report) => RegionCell {
                    a,
                    tau,
                    abscissa: report.abscissa,
                    verdict: report.verdict,
                },
                Err(_) => RegionCell {
                    a,
                    tau,
                    abscissa: f64::NAN,
                    verdict: Verdict::Indeterminate,
                },
            }
        })
        .collect();

    Ok(RegionMap {
        a_axis: a_axis.to_vec(),
        tau_axis: tau_axis.to_vec(),
        cells,
    })
}

/// Defect of the best normalized quasi-eigenvector of mode `mode_index` at
/// a continuous-spectrum point: `|lambda|^2 / sqrt(lambda_k)`. Its decay in
/// lambda_k is what places the locus in the essential spectrum.
///
/// `lambda` must satisfy `|sigma(lambda)| <= 1e-8`.
pub fn singular_residual(
    lambda: Complex64,
    modes: &ModeSet,
    mode_index: usize,
    p: &SystemParams,
) -> Result<f64> {
    let lambda_k = modes.lambda(mode_index)?;
    let sigma = sigma_fn(lambda, p).norm();
    if sigma > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} is not on the continuous-spectrum locus: \
             |sigma| = {sigma:.3e}"
        )));
    }
    Ok(lambda.norm_sqr() / lambda_k.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn params(a: f64, tau: f64) -> SystemParams {
        SystemParams::new(a, tau, None).unwrap()
    }

    #[test]
    fn witness_numbers_match_hand_arithmetic() {
        // lambda_k = 1, theta = pi/3: y = sqrt(1/2), a = sin(pi/3)/y,
        // tau = (pi/3)/y.
        let pair = instability_pair(1.0, FRAC_PI_3).unwrap();
        assert_relative_eq!(pair.y, 0.5_f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            pair.a,
            (FRAC_PI_3.sin()) / 0.5_f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(pair.tau, FRAC_PI_3 / 0.5_f64.sqrt(), max_relative = 1e-15);
        assert!(pair.a < pair.tau);
        assert!(pair.residual <= 1e-12 * (1.0 + pair.lambda_k));
    }

    #[test]
    fn witness_closed_form_agrees_with_parametrization() {
        for lambda_k in [1.0, PI * PI, 100.0] {
            for theta in [0.3, FRAC_PI_3, 1.5] {
                let pair = instability_pair(lambda_k, theta).unwrap();
                assert!(
                    (pair.y - pair.y_closed_form()).abs() <= 1e-10 * pair.y,
                    "lambda_k = {lambda_k}, theta = {theta}"
                );
                // The parametrization identity y^4/lambda_k^2 + a^2 y^2 = 1.
                let lhs =
                    pair.y.powi(4) / (lambda_k * lambda_k) + pair.a * pair.a * pair.y * pair.y;
                assert_relative_eq!(lhs, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn witness_rejects_degenerate_angles() {
        assert!(instability_pair(1.0, 0.0).is_err());
        assert!(instability_pair(1.0, FRAC_PI_2).is_err());
        assert!(instability_pair(-1.0, 0.5).is_err());
    }

    #[test]
    fn sigma_spectrum_matches_the_defining_function() {
        let p = params(1.0, 1.0);
        let roots = sigma_spectrum(&p, 5).unwrap();
        assert_eq!(roots.len(), 11);
        for r in &roots {
            assert!(r.residual <= tol::SIGMA_ROOT_RESIDUAL);
            assert!(r.lambda.re < 0.0, "{} at {}", r.source, r.lambda);
        }
        // Principal pair, frozen from the Lambert value W_0(-1).
        let principal = roots
            .iter()
            .find(|r| matches!(r.source, RootSource::Sigma { branch: Some(0) }))
            .unwrap();
        assert_relative_eq!(
            principal.lambda.re,
            -0.318_131_505_204_764_1,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            principal.lambda.im,
            1.337_235_701_430_689_5,
            epsilon = 1e-10
        );
        let mirror = roots
            .iter()
            .find(|r| matches!(r.source, RootSource::Sigma { branch: Some(-1) }))
            .unwrap();
        assert!((mirror.lambda - principal.lambda.conj()).norm() < 1e-10);
    }

    #[test]
    fn sigma_spectrum_is_left_of_the_axis_iff_threshold_holds() {
        // tau <= a keeps the locus strictly in the left half plane; beyond
        // tau = a pi/2 the principal pair crosses to the right.
        let stable = params(2.0, 1.0);
        for r in sigma_spectrum(&stable, 4).unwrap() {
            assert!(r.lambda.re < 0.0);
        }
        let crossed = params(1.0, 2.0);
        let n_right = sigma_spectrum(&crossed, 4)
            .unwrap()
            .iter()
            .filter(|r| r.lambda.re > 0.0)
            .count();
        assert!(
            n_right > 0,
            "expected right-half-plane sigma roots at tau/a = 2"
        );
    }

    #[test]
    fn mode_spectrum_finds_the_marginal_root_of_a_witness() {
        let pair = instability_pair(1.0, FRAC_PI_3).unwrap();
        let p = pair.params().unwrap();
        let modes = ModeSet::from_lambdas(vec![pair.lambda_k]).unwrap();
        let w = Window::new(-0.5, 0.5, 0.2, 1.2, 16).unwrap();
        let spec = mode_spectrum(&p, &modes, 1, &w, 1e-10).unwrap();
        assert_eq!(spec.roots.len(), 1);
        let root = spec.roots[0].lambda;
        assert!(root.re.abs() <= 1e-8, "marginal root drifted: {root}");
        assert!((root.im - pair.y).abs() <= 1e-8);
        assert_eq!(spec.mode_index, 1);
        assert!(spec.abscissa.abs() <= 1e-8);
    }

    #[test]
    fn empty_mode_spectrum_reports_negative_infinite_abscissa() {
        let p = params(2.0, 0.5);
        let modes = ModeSet::from_lambdas(vec![4.0]).unwrap();
        let w = Window::new(0.5, 2.0, -3.0, 3.0, 16).unwrap();
        let spec = mode_spectrum(&p, &modes, 1, &w, 1e-9).unwrap();
        assert!(spec.roots.is_empty());
        assert_eq!(spec.abscissa, f64::NEG_INFINITY);
    }

    #[test]
    fn verdict_is_certified_stable_below_threshold() {
        let p = params(1.0, 1.0);
        let modes = ModeSet::from_lambdas(vec![1.0, PI * PI]).unwrap();
        let w = crate::quasipoly::default_window(&p, modes.max_lambda());
        let report = stability_verdict(&p, &modes, &w, 1e-9, 4).unwrap();
        assert!(report.certified);
        assert_eq!(report.verdict, Verdict::Stable);
        assert!(report.abscissa < 0.0);
    }

    #[test]
    fn verdict_is_unstable_past_a_witness() {
        // Push tau a little beyond the marginal curve; the witness root
        // moves into the right half plane.
        let pair = instability_pair(1.0, FRAC_PI_3).unwrap();
        let p = SystemParams::new(pair.a, pair.tau * 1.05, None).unwrap();
        let modes = ModeSet::from_lambdas(vec![pair.lambda_k]).unwrap();
        let w = crate::quasipoly::default_window(&p, modes.max_lambda());
        let report = stability_verdict(&p, &modes, &w, 1e-9, 4).unwrap();
        assert!(!report.certified);
        assert_eq!(report.verdict, Verdict::Unstable);
        assert!(report.abscissa > 0.0);
    }

    #[test]
    fn abscissa_attaining_root_is_reported() {
        let p = params(1.0, 1.0);
        let modes = ModeSet::from_lambdas(vec![1.0]).unwrap();
        let w = crate::quasipoly::default_window(&p, 1.0);
        let (abscissa, root) = spectral_abscissa(&p, &modes, &w, 1e-9, 3).unwrap();
        assert_eq!(abscissa, root.lambda.re);
        assert!(abscissa < 0.0);
    }

    #[test]
    fn region_map_is_stable_on_the_threshold_side() {
        let modes = ModeSet::from_lambdas(vec![1.0]).unwrap();
        let a_axis = [0.5, 1.0, 1.5];
        let tau_axis = [0.4, 0.9, 1.4];
        let w = Window::new(-8.0, 2.0, -30.0, 30.0, 32).unwrap();
        let map = region_map(&a_axis, &tau_axis, &modes, &w, 1e-9, 3).unwrap();
        assert_eq!(map.cells.len(), 9);
        for (ai, &a) in a_axis.iter().enumerate() {
            for (ti, &tau) in tau_axis.iter().enumerate() {
                let cell = map.cell(ai, ti);
                assert_eq!((cell.a, cell.tau), (a, tau));
                if tau <= a {
                    assert_eq!(
                        cell.verdict,
                        Verdict::Stable,
                        "cell a = {a}, tau = {tau}, abscissa = {}",
                        cell.abscissa
                    );
                }
            }
        }
    }

    #[test]
    fn singular_residual_decays_like_inverse_sqrt_lambda() {
        let p = params(1.0, 1.0);
        let lambda = lambert_w(0, Complex64::new(-1.0, 0.0)).unwrap() / p.tau;
        let modes = ModeSet::from_lambdas(vec![1.0, 100.0, 10_000.0]).unwrap();
        let r1 = singular_residual(lambda, &modes, 1, &p).unwrap();
        let r2 = singular_residual(lambda, &modes, 2, &p).unwrap();
        let r3 = singular_residual(lambda, &modes, 3, &p).unwrap();
        assert_relative_eq!(r1, lambda.norm_sqr(), max_relative = 1e-12);
        assert_relative_eq!(r1 / r2, 10.0, max_relative = 1e-12);
        assert_relative_eq!(r2 / r3, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn singular_residual_requires_a_locus_point() {
        let p = params(1.0, 1.0);
        let modes = ModeSet::from_lambdas(vec![1.0]).unwrap();
        let off = Complex64::new(0.5, 0.5);
        assert!(singular_residual(off, &modes, 1, &p).is_err());
    }
}
