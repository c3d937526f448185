//! Argument-principle winding count over a rectangle boundary.
//!
//! The characteristic families are entire, so the number of zeros enclosed
//! by a rectangle (with multiplicity) equals the winding number of f around
//! the boundary. The phase is tracked with adaptive bisection so that no
//! segment contributes more than a quarter turn, which pins the continuous
//! argument without ambiguity.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{CharFn, Window};
use crate::error::{Error, Result};
use crate::tol;

/// Maximum bisection depth per boundary segment before the window is
/// declared indeterminate.
const MAX_DEPTH: usize = 48;

/// Counts zeros of `f` inside `w` with multiplicity.
///
/// Fails with [`Error::IndeterminateWindow`] when a boundary sample falls
/// below the cancellation floor (a zero on or next to the contour) or when
/// phase refinement cannot settle the argument.
pub fn winding_count(f: &CharFn, w: &Window) -> Result<i64> {
    w.validate()?;
    w.validate_depth(f.tau())?;

    let corners = [
        Complex64::new(w.re_min, w.im_min),
        Complex64::new(w.re_max, w.im_min),
        Complex64::new(w.re_max, w.im_max),
        Complex64::new(w.re_min, w.im_max),
    ];

    let mut total = 0.0;
    for i in 0..4 {
        let start = corners[i];
        let end = corners[(i + 1) % 4];
        total += edge_phase_change(f, start, end, w.grid_n)?;
    }

    let turns = total / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 0.25 {
        return Err(Error::IndeterminateWindow(format!(
            "accumulated phase {turns:.6} turns is not close to an integer"
        )));
    }
    Ok(count as i64)
}

/// Hard cap on initial segments per edge, reached only for windows far
/// taller than any root search needs.
const MAX_EDGE_SEGMENTS: usize = 50_000;

/// Continuous argument change of f along one edge.
///
/// The initial sampling density is driven by the fastest rotating term:
/// the exponential turns the phase at rate tau per unit of imaginary part,
/// so segments are kept short enough that no term alone can wrap the
/// argument within one, and midpoint-verified bisection settles the rest.
fn edge_phase_change(f: &CharFn, start: Complex64, end: Complex64, n: usize) -> Result<f64> {
    let exp_turn = f.tau() * (end.im - start.im).abs();
    let n = n.max(16).max(((exp_turn + 2.0 * PI) / 0.5).ceil() as usize);
    if n > MAX_EDGE_SEGMENTS {
        return Err(Error::InvalidParameter(format!(
            "contour edge from {start} to {end} needs {n} segments at \
             delay {}; shrink the window",
            f.tau()
        )));
    }
    let mut total = 0.0;
    let mut prev_point = start;
    let mut prev_value = boundary_value(f, prev_point)?;
    for i in 1..=n {
        let t = i as f64 / n as f64;
        let point = start + (end - start) * t;
        let value = boundary_value(f, point)?;
        total += segment_phase(f, prev_point, prev_value, point, value, MAX_DEPTH)?;
        prev_point = point;
        prev_value = value;
    }
    Ok(total)
}

/// Phase change across one segment, bisecting until both halves turn by at
/// most pi/2.
///
/// Accepting on the endpoint difference alone would alias: a turn of
/// almost 2 pi wraps to a small value with the wrong sign. Each candidate
/// segment is therefore checked at its midpoint, and only accepted when
/// both halves stay within a quarter turn.
fn segment_phase(
    f: &CharFn,
    a: Complex64,
    fa: Complex64,
    b: Complex64,
    fb: Complex64,
    depth: usize,
) -> Result<f64> {
    if depth == 0 {
        let d = (fb / fa).arg();
        if d.abs() <= PI / 2.0 {
            return Ok(d);
        }
        return Err(Error::IndeterminateWindow(format!(
            "phase refinement exhausted between {a} and {b}"
        )));
    }
    let mid = (a + b) / 2.0;
    let fm = boundary_value(f, mid)?;
    let left = (fm / fa).arg();
    let right = (fb / fm).arg();
    if left.abs() <= PI / 2.0 && right.abs() <= PI / 2.0 {
        return Ok(left + right);
    }
    Ok(segment_phase(f, a, fa, mid, fm, depth - 1)? + segment_phase(f, mid, fm, b, fb, depth - 1)?)
}

/// Evaluates f on the contour and rejects values lost to cancellation,
/// which indicate a zero on or immediately next to the boundary.
fn boundary_value(f: &CharFn, point: Complex64) -> Result<Complex64> {
    let value = f.eval(point);
    let floor = tol::BOUNDARY_FLOOR_REL * f.term_scale(point);
    if value.norm() <= floor {
        return Err(Error::IndeterminateWindow(format!(
            "|f({point})| = {:.3e} is at the cancellation floor {floor:.3e}",
            value.norm()
        )));
    }
    Ok(value)
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
    fn sigma_window_counts_match_closed_form() {
        // a = 1, tau = 1: sigma roots are W_j(-1); the principal pair sits
        // at -0.3181 +/- 1.3372 i.
        let p = params(1.0, 1.0);
        let f = CharFn::sigma(&p);
        let upper = Window::new(-1.0, 1.0, 0.5, 2.0, 16).unwrap();
        assert_eq!(winding_count(&f, &upper).unwrap(), 1);
        let both = Window::new(-1.0, 1.0, -2.0, 2.0, 16).unwrap();
        assert_eq!(winding_count(&f, &both).unwrap(), 2);
        let empty = Window::new(0.5, 1.5, -0.5, 0.5, 16).unwrap();
        assert_eq!(winding_count(&f, &empty).unwrap(), 0);

        // Cross-check the enclosed root against the Lambert oracle.
        let root = lambert_w(0, Complex64::new(-1.0, 0.0)).unwrap() / p.tau;
        assert!(upper.contains(root));
    }

    #[test]
    fn right_half_plane_is_empty_below_threshold() {
        // tau <= a: no characteristic root has nonnegative real part.
        let w = Window::new(0.0, 5.0, -50.0, 50.0, 32).unwrap();
        for (a, tau, lk) in [(1.0, 1.0, 1.0), (2.0, 0.5, 97.4), (5.0, 5.0, 0.3)] {
            let p = params(a, tau);
            let f = CharFn::mode(&p, 0, lk).unwrap();
            assert_eq!(
                winding_count(&f, &w).unwrap(),
                0,
                "a = {a}, tau = {tau}, lambda_k = {lk}"
            );
        }
    }

    #[test]
    fn multiplicity_is_counted() {
        // tau/a = 1/e puts a double sigma root at lambda = -1/tau.
        let tau = 1.0 / std::f64::consts::E;
        let p = params(1.0, tau);
        let f = CharFn::sigma(&p);
        let w = Window::new(-4.0, -1.5, -1.0, 1.0, 24).unwrap();
        assert_eq!(winding_count(&f, &w).unwrap(), 2);
    }

    #[test]
    fn boundary_zero_is_reported_indeterminate() {
        // Put the top edge through the principal sigma root's imaginary
        // part so the contour passes next to the zero.
        let p = params(1.0, 1.0);
        let root = lambert_w(0, Complex64::new(-1.0, 0.0)).unwrap() / p.tau;
        let f = CharFn::sigma(&p);
        let w = Window {
            re_min: root.re - 1.0,
            re_max: root.re + 1.0,
            im_min: 0.0,
            im_max: root.im,
            grid_n: 16,
        };
        match winding_count(&f, &w) {
            Err(Error::IndeterminateWindow(_)) => {}
            other => panic!("expected indeterminate window, got {other:?}"),
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        let p = params(1.0, 2.0);
        let f = CharFn::sigma(&p);
        let w = Window::new(-16.0, 1.0, -1.0, 1.0, 16).unwrap();
        match winding_count(&f, &w) {
            Err(Error::InvalidParameter(_)) => {}
            other => panic!("expected depth-cap rejection, got {other:?}"),
        }
    }
}
