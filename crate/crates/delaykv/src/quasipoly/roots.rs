//! Grid-seeded Newton root capture, certified by the winding count.
//!
//! Candidate cells are those whose corners show a sign change in both the
//! real and imaginary parts of f, the usual zero-curve intersection
//! pattern. Each candidate is polished by Newton, deduplicated, and the
//! final tally must match the argument-principle count exactly; otherwise
//! the grid is refined, and after the refinement ladder the mismatch is
//! reported rather than silently accepted.

use num_complex::Complex64;

use super::{validate_tol, CharFn, Root, Window};
use crate::error::{Error, Result};
use crate::tol;

const NEWTON_MAX_ITER: usize = 80;
/// Grid refinement ladder: each retry doubles the seeding density.
const MAX_REFINEMENTS: usize = 3;

/// Finds every zero of `f` inside `w` with residual at most `tol_abs`.
///
/// The returned roots are sorted by real part, then imaginary part. A
/// multiple root (or a cluster the polish cannot separate) surfaces as
/// [`Error::IncompleteRootCapture`] because the winding count sees the
/// multiplicity while deduplication collapses the copies.
pub fn find_roots(f: &CharFn, w: &Window, tol_abs: f64) -> Result<Vec<Root>> {
    w.validate()?;
    w.validate_depth(f.tau())?;
    validate_tol(tol_abs)?;

    let expected = super::winding_count(f, w)?;
    if expected < 0 {
        return Err(Error::Inconsistency(format!(
            "winding count {expected} is negative for an entire function"
        )));
    }
    let expected = expected as usize;
    if expected == 0 {
        return Ok(Vec::new());
    }

    let mut grid_n = w.grid_n.max(16);
    let mut found = 0;
    for _ in 0..=MAX_REFINEMENTS {
        let roots = capture_pass(f, w, tol_abs, grid_n);
        found = roots.len();
        if found == expected {
            return Ok(roots);
        }
        grid_n *= 2;
    }
    Err(Error::IncompleteRootCapture { found, expected })
}

/// One seeding-and-polish pass at a fixed grid density.
fn capture_pass(f: &CharFn, w: &Window, tol_abs: f64, grid_n: usize) -> Vec<Root> {
    let nx = grid_n;
    let ny = grid_sizes(w, grid_n);
    let dx = w.width() / nx as f64;
    let dy = w.height() / ny as f64;

    // Corner values for the whole grid, row-major.
    let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let im = w.im_min + dy * j as f64;
        for i in 0..=nx {
            let re = w.re_min + dx * i as f64;
            values.push(f.eval(Complex64::new(re, im)));
        }
    }
    let at = |i: usize, j: usize| values[j * (nx + 1) + i];

    let mut accepted: Vec<Root> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let corners = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if !(mixed_signs(corners.iter().map(|c| c.re))
                && mixed_signs(corners.iter().map(|c| c.im)))
            {
                continue;
            }
            let seed = Complex64::new(
                w.re_min + dx * (i as f64 + 0.5),
                w.im_min + dy * (j as f64 + 0.5),
            );
            let Some(root) = polish(f, seed, tol_abs) else {
                continue;
            };
            if !w.contains(root.lambda) {
                continue;
            }
            let radius = tol::DEDUPE_FACTOR * tol_abs * (1.0 + root.lambda.norm());
            if accepted
                .iter()
                .all(|r| (r.lambda - root.lambda).norm() > radius)
            {
                accepted.push(root);
            }
        }
    }

    accepted.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("finite roots")
    });
    accepted
}

/// Keeps grid cells roughly square so tall windows are not undersampled
/// horizontally or oversampled vertically.
fn grid_sizes(w: &Window, grid_n: usize) -> usize {
    let aspect = w.height() / w.width();
    ((grid_n as f64 * aspect).ceil() as usize).clamp(grid_n, 64 * grid_n)
}

fn mixed_signs(values: impl Iterator<Item = f64>) -> bool {
    let mut pos = false;
    let mut neg = false;
    for v in values {
        if v >= 0.0 {
            pos = true;
        }
        if v <= 0.0 {
            neg = true;
        }
    }
    pos && neg
}

/// Newton iteration from a cell-center seed. Returns None when the
/// iteration leaves the basin or cannot reach the residual target.
fn polish(f: &CharFn, seed: Complex64, tol_abs: f64) -> Option<Root> {
    let mut lambda = seed;
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..NEWTON_MAX_ITER {
        let value = f.eval(lambda);
        let res = value.norm();
        if best.is_none_or(|(_, b)| res < b) {
            best = Some((lambda, res));
        }
        // Polish well below the acceptance target so duplicates from
        // neighboring cells collapse inside the dedupe radius.
        if res <= 1e-3 * tol_abs || res <= 1e2 * f64::EPSILON * f.term_scale(lambda) {
            break;
        }
        let deriv = f.deriv(lambda);
        if deriv.norm() == 0.0 {
            break;
        }
        let step = value / deriv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        lambda -= step;
        if step.norm() <= f64::EPSILON * lambda.norm().max(1.0) {
            let res = f.eval(lambda).norm();
            if best.is_none_or(|(_, b)| res < b) {
                best = Some((lambda, res));
            }
            break;
        }
    }
    let (lambda, residual) = best?;
    if residual <= tol_abs {
        Some(Root {
            lambda,
            residual,
            source: f.source_tag(),
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use crate::quasipoly::lambert_w;

    fn params(a: f64, tau: f64) -> SystemParams {
        SystemParams::new(a, tau, None).unwrap()
    }

    #[test]
    fn sigma_roots_match_the_lambert_oracle() {
        let p = params(1.0, 1.0);
        let f = CharFn::sigma(&p);
        let w = Window::new(-1.0, 1.0, -2.0, 2.0, 16).unwrap();
        let roots = find_roots(&f, &w, 1e-10).unwrap();
        assert_eq!(roots.len(), 2);

        let oracle = lambert_w(0, Complex64::new(-1.0, 0.0)).unwrap() / p.tau;
        let found_upper = roots
            .iter()
            .find(|r| r.lambda.im > 0.0)
            .expect("one root in the upper half plane");
        assert!(
            (found_upper.lambda - oracle).norm() < 1e-8,
            "{} vs {oracle}",
            found_upper.lambda
        );
        // Conjugate closure for a symmetric window.
        let found_lower = roots.iter().find(|r| r.lambda.im < 0.0).unwrap();
        assert!((found_lower.lambda - oracle.conj()).norm() < 1e-8);
        for r in &roots {
            assert!(r.residual <= 1e-10);
        }
    }

    #[test]
    fn roots_are_sorted_and_inside_the_window() {
        let p = params(0.4, 1.1);
        let f = CharFn::mode(&p, 1, 9.0).unwrap();
        let w = Window::new(-6.0, 2.0, -25.0, 25.0, 32).unwrap();
        let roots = find_roots(&f, &w, 1e-9).unwrap();
        assert!(!roots.is_empty());
        for pair in roots.windows(2) {
            let a = (pair[0].lambda.re, pair[0].lambda.im);
            let b = (pair[1].lambda.re, pair[1].lambda.im);
            assert!(a <= b, "roots out of order: {a:?} vs {b:?}");
        }
        for r in &roots {
            assert!(w.contains(r.lambda));
            assert!(r.residual <= 1e-9);
            // Each reported root is an actual zero: Newton from it stays put.
            assert!(f.eval(r.lambda).norm() <= 1e-9);
        }
    }

    #[test]
    fn double_root_is_reported_as_incomplete_capture() {
        // tau/a = 1/e puts a double sigma root at -1/tau where the winding
        // count sees 2 and polishing can only produce one point.
        let tau = 1.0 / std::f64::consts::E;
        let p = params(1.0, tau);
        let f = CharFn::sigma(&p);
        let w = Window::new(-4.0, -1.5, -1.0, 1.0, 24).unwrap();
        match find_roots(&f, &w, 1e-9) {
            Err(Error::IncompleteRootCapture { found, expected }) => {
                assert_eq!(expected, 2);
                assert_ne!(found, expected);
            }
            other => panic!("expected incomplete capture, got {other:?}"),
        }
    }

    #[test]
    fn empty_windows_return_no_roots() {
        let p = params(2.0, 0.5);
        let f = CharFn::mode(&p, 1, 4.0).unwrap();
        let w = Window::new(0.1, 3.0, -10.0, 10.0, 16).unwrap();
        assert_eq!(find_roots(&f, &w, 1e-9).unwrap().len(), 0);
    }

    #[test]
    fn tolerance_is_validated() {
        let p = params(1.0, 1.0);
        let f = CharFn::sigma(&p);
        let w = Window::new(-1.0, 1.0, -2.0, 2.0, 16).unwrap();
        assert!(find_roots(&f, &w, 0.0).is_err());
        assert!(find_roots(&f, &w, -1.0).is_err());
        assert!(find_roots(&f, &w, 0.5).is_err());
        assert!(find_roots(&f, &w, f64::NAN).is_err());
    }
}
