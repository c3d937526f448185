//! Time-domain integration of the modal delay equation
//! `u'' + a lambda_k u' + lambda_k u(t - tau) = 0` by the method of steps,
//! with the discrete energy functional, exponential decay fits, a sampled
//! dissipativity check, and synthesis of modal trajectories into a wave
//! field on a spatial grid.

use crate::error::{Error, Result};
use crate::params::{ModeOrigin, ModeSet, SystemParams};
use crate::tol;

/// Fewest integration steps per delay interval.
const MIN_STEPS_PER_DELAY: usize = 8;
/// Hard cap on total steps so a misconfigured run fails fast instead of
/// exhausting memory.
const MAX_STEPS: usize = 2_000_000;
/// Multiplier on the h^2 finite-difference error scale used as slack in the
/// dissipativity check.
const SLACK_COEFF: f64 = 4.0;

/// Initial data on the delay interval `[-tau, 0]`, sampled at `m + 1`
/// equally spaced nodes together with derivative values used for the
/// half-step interpolation.
#[derive(Debug, Clone)]
pub struct DelayHistory {
    tau: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl DelayHistory {
    fn validate_shape(tau: f64, m: usize) -> Result<()> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "delay tau = {tau} must be finite and positive"
            )));
        }
        if m < MIN_STEPS_PER_DELAY {
            return Err(Error::InvalidParameter(format!(
                "steps per delay m = {m} must be at least {MIN_STEPS_PER_DELAY}"
            )));
        }
        Ok(())
    }

    fn checked(tau: f64, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        for (label, xs) in [("value", &values), ("derivative", &derivs)] {
            if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "history {label} {x} is not finite"
                )));
            }
        }
        Ok(DelayHistory {
            tau,
            values,
            derivs,
        })
    }

    /// History identically equal to `c`.
    pub fn constant(tau: f64, m: usize, c: f64) -> Result<Self> {
        Self::validate_shape(tau, m)?;
        Self::checked(tau, vec![c; m + 1], vec![0.0; m + 1])
    }

    /// Samples `f` at the nodes; derivatives are estimated from `f` by
    /// second-order differences with a step far below the node spacing.
    pub fn from_fn(tau: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::validate_shape(tau, m)?;
        let h = tau / m as f64;
        let delta = 1e-6 * tau;
        let node = |j: usize| -tau + j as f64 * h;
        let values: Vec<f64> = (0..=m).map(|j| f(node(j))).collect();
        let derivs: Vec<f64> = (0..=m)
            .map(|j| {
                let t = node(j);
                if j == 0 {
                    (-3.0 * f(t) + 4.0 * f(t + delta) - f(t + 2.0 * delta)) / (2.0 * delta)
                } else if j == m {
                    (3.0 * f(t) - 4.0 * f(t - delta) + f(t - 2.0 * delta)) / (2.0 * delta)
                } else {
                    (f(t + delta) - f(t - delta)) / (2.0 * delta)
                }
            })
            .collect();
        Self::checked(tau, values, derivs)
    }

    /// Samples `f` and its exact derivative `df` at the nodes.
    pub fn from_fn_with_derivative(
        tau: f64,
        m: usize,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Self::validate_shape(tau, m)?;
        let h = tau / m as f64;
        let node = |j: usize| -tau + j as f64 * h;
        let values = (0..=m).map(|j| f(node(j))).collect();
        let derivs = (0..=m).map(|j| df(node(j))).collect();
        Self::checked(tau, values, derivs)
    }

    /// Takes `m + 1` node values directly; derivatives are estimated from
    /// the samples by second-order differences, so they carry an error of
    /// order `(tau / m)^2`.
    pub fn from_samples(tau: f64, values: &[f64]) -> Result<Self> {
        if values.len() < MIN_STEPS_PER_DELAY + 1 {
            return Err(Error::InvalidParameter(format!(
                "history needs at least {} samples, got {}",
                MIN_STEPS_PER_DELAY + 1,
                values.len()
            )));
        }
        let m = values.len() - 1;
        Self::validate_shape(tau, m)?;
        let h = tau / m as f64;
        let derivs: Vec<f64> = (0..=m)
            .map(|j| {
                if j == 0 {
                    (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
                } else if j == m {
                    (3.0 * values[m] - 4.0 * values[m - 1] + values[m - 2]) / (2.0 * h)
                } else {
                    (values[j + 1] - values[j - 1]) / (2.0 * h)
                }
            })
            .collect();
        Self::checked(tau, values.to_vec(), derivs)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Steps per delay interval.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    /// Node value at `t = -tau + j tau / m`.
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn deriv(&self, j: usize) -> f64 {
        self.derivs[j]
    }
}

/// Solution samples of one modal equation on the step grid, retaining the
/// history prefix so delayed values stay addressable.
#[derive(Debug, Clone)]
pub struct ModalTrajectory {
    pub lambda_k: f64,
    pub tau: f64,
    /// Step size `tau / m`.
    pub h: f64,
    m: usize,
    /// Index `i` holds `(u, u')` at `t = (i - m) h`.
    buf: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl ModalTrajectory {
    /// Number of samples at `t >= 0`.
    pub fn len(&self) -> usize {
        self.buf.len() - self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Steps per delay interval.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn u(&self, i: usize) -> f64 {
        self.buf[self.m + i].0
    }

    pub fn v(&self, i: usize) -> f64 {
        self.buf[self.m + i].1
    }

    /// `u(t_i - j h)` for `j <= m + i`, reaching back into the history.
    pub fn delayed_u(&self, i: usize, j: usize) -> f64 {
        self.buf[self.m + i - j].0
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn u_values(&self) -> Vec<f64> {
        self.buf[self.m..].iter().map(|s| s.0).collect()
    }

    pub fn v_values(&self) -> Vec<f64> {
        self.buf[self.m..].iter().map(|s| s.1).collect()
    }
}

/// Value halfway between two nodes from a cubic fit to the node values and
/// derivatives.
fn hermite_mid(left: (f64, f64), right: (f64, f64), h: f64) -> f64 {
    0.5 * (left.0 + right.0) + h * (left.1 - right.1) / 8.0
}

/// Integrates `u'' + a lambda_k u' + lambda_k u(t - tau) = 0` from
/// `(u0, v0)` with the given history, by classical Runge-Kutta on steps of
/// `tau / m`, until the first grid time at or past `t_final`.
///
/// Delayed values at half steps come from cubic interpolation of the
/// stored `(u, u')` pairs, which keeps the overall order at four. A
/// mismatch between the history endpoint and `u0` is recorded as a warning;
/// the solver then trusts `(u0, v0)`.
pub fn simulate_mode(
    p: &SystemParams,
    lambda_k: f64,
    u0: f64,
    v0: f64,
    history: &DelayHistory,
    t_final: f64,
) -> Result<ModalTrajectory> {
    if !lambda_k.is_finite() || lambda_k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue lambda_k = {lambda_k} must be finite and positive"
        )));
    }
    if !u0.is_finite() || !v0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "initial data ({u0}, {v0}) must be finite"
        )));
    }
    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "final time {t_final} must be finite and positive"
        )));
    }
    if (history.tau - p.tau).abs() > 1e-12 * p.tau {
        return Err(Error::InvalidParameter(format!(
            "history delay {} does not match the system delay {}",
            history.tau, p.tau
        )));
    }

    let m = history.m();
    let h = p.tau / m as f64;
    let n_steps = ((t_final / h - 1e-9).ceil() as usize).max(1);
    if n_steps > MAX_STEPS {
        return Err(Error::InvalidParameter(format!(
            "t_final = {t_final} with m = {m} needs {n_steps} steps, \
             above the cap of {MAX_STEPS}"
        )));
    }

    let mut warnings = Vec::new();
    if (history.value(m) - u0).abs() > 1e-9 * (1.0 + u0.abs()) {
        warnings.push(format!(
            "history ends at u = {} but the initial value is {u0}; \
             the trajectory starts from the initial value",
            history.value(m)
        ));
    }

    let mut buf: Vec<(f64, f64)> = Vec::with_capacity(m + 1 + n_steps);
    for j in 0..m {
        buf.push((history.value(j), history.deriv(j)));
    }
    buf.push((u0, v0));

    let a = p.a;
    let rhs =
        |v: f64, u_delayed: f64| -> (f64, f64) { (v, -a * lambda_k * v - lambda_k * u_delayed) };

    for n in 0..n_steps {
        let (u, v) = buf[m + n];
        let ud_full = buf[n].0;
        let ud_next = buf[n + 1].0;
        let ud_mid = hermite_mid(buf[n], buf[n + 1], h);

        let (k1u, k1v) = rhs(v, ud_full);
        let (k2u, k2v) = rhs(v + 0.5 * h * k1v, ud_mid);
        let (k3u, k3v) = rhs(v + 0.5 * h * k2v, ud_mid);
        let (k4u, k4v) = rhs(v + h * k3v, ud_next);

        let u_next = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let v_next = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !u_next.is_finite()
            || !v_next.is_finite()
            || u_next.abs() > tol::DIVERGENCE_LIMIT
            || v_next.abs() > tol::DIVERGENCE_LIMIT
        {
            return Err(Error::Divergence {
                t: (n + 1) as f64 * h,
                limit: tol::DIVERGENCE_LIMIT,
            });
        }
        buf.push((u_next, v_next));
    }

    Ok(ModalTrajectory {
        lambda_k,
        tau: p.tau,
        h,
        m,
        buf,
        warnings,
    })
}

/// Time series of the modal energy and its three parts.
#[derive(Debug, Clone)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    /// `v^2 / 2`.
    pub kinetic: Vec<f64>,
    /// `lambda_k u^2 / 2`.
    pub potential: Vec<f64>,
    /// `(xi lambda_k / 2) * integral of u(t - tau rho)^2 over rho in [0, 1]`.
    pub history: Vec<f64>,
}

/// Evaluates the energy along a trajectory, with the history integral
/// approximated by the trapezoid rule on the step grid.
pub fn energy_trace(traj: &ModalTrajectory, p: &SystemParams) -> Result<EnergyTrace> {
    if (traj.tau - p.tau).abs() > 1e-12 * p.tau {
        return Err(Error::InvalidParameter(format!(
            "trajectory delay {} does not match the system delay {}",
            traj.tau, p.tau
        )));
    }
    let m = traj.m();
    let n = traj.len();
    let lambda_k = traj.lambda_k;
    let mut times = Vec::with_capacity(n);
    let mut total = Vec::with_capacity(n);
    let mut kinetic = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    let mut history = Vec::with_capacity(n);
    for i in 0..n {
        let u = traj.u(i);
        let v = traj.v(i);
        let mut quad = 0.0;
        for j in 0..=m {
            let w = if j == 0 || j == m { 0.5 } else { 1.0 };
            let ud = traj.delayed_u(i, j);
            quad += w * ud * ud;
        }
        quad /= m as f64;
        let kin = 0.5 * v * v;
        let pot = 0.5 * lambda_k * u * u;
        let hist = 0.5 * p.xi * lambda_k * quad;
        times.push(traj.time(i));
        kinetic.push(kin);
        potential.push(pot);
        history.push(hist);
        total.push(kin + pot + hist);
    }
    Ok(EnergyTrace {
        times,
        total,
        kinetic,
        potential,
        history,
    })
}

/// Least-squares exponential fit to an energy trace.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Fitted slope of `ln E`, so `E(t) ~ exp(rate * t)`. For a trajectory
    /// dominated by a simple root this approaches twice the root's real
    /// part.
    pub rate: f64,
    /// Root-mean-square residual of `ln E` around the fit.
    pub residual: f64,
    /// True when the residual exceeds the poor-fit threshold, meaning the
    /// trace is not close to a single exponential on the window.
    pub poor_fit: bool,
    pub samples: usize,
}

/// Fits `ln E` over `t0 <= t <= t1` by least squares.
pub fn fit_decay_rate(trace: &EnergyTrace, t0: f64, t1: f64) -> Result<DecayFit> {
    if !t0.is_finite() || !t1.is_finite() || t0 >= t1 {
        return Err(Error::InvalidParameter(format!(
            "fit window [{t0}, {t1}] must be finite with t0 < t1"
        )));
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (i, &t) in trace.times.iter().enumerate() {
        if t < t0 || t > t1 {
            continue;
        }
        let e = trace.total[i];
        if e <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "energy {e} at t = {t} is not positive, so ln E is undefined"
            )));
        }
        ts.push(t);
        ys.push(e.ln());
    }
    if ts.len() < 8 {
        return Err(Error::InvalidParameter(format!(
            "fit window [{t0}, {t1}] contains only {} samples, need 8",
            ts.len()
        )));
    }
    let n = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for (&t, &y) in ts.iter().zip(&ys) {
        stt += (t - t_mean) * (t - t_mean);
        sty += (t - t_mean) * (y - y_mean);
    }
    let rate = sty / stt;
    let mut ss = 0.0;
    for (&t, &y) in ts.iter().zip(&ys) {
        let fit = y_mean + rate * (t - t_mean);
        ss += (y - fit) * (y - fit);
    }
    let residual = (ss / n).sqrt();
    Ok(DecayFit {
        rate,
        residual,
        poor_fit: residual > tol::POOR_FIT_RESIDUAL,
        samples: ts.len(),
    })
}

/// Outcome of checking the energy inequality along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct DissipativityReport {
    /// Interior samples checked.
    pub checked: usize,
    /// Samples where the differenced energy exceeded the bound by more
    /// than the slack.
    pub violations: usize,
    /// Largest value of `dE/dt - bound - slack`; at most zero when the
    /// inequality holds everywhere.
    pub max_excess: f64,
    /// Largest gap between the centered difference of E and the exact
    /// derivative formula, a direct read of the discretization error.
    pub fd_error_max: f64,
    pub slack_max: f64,
}

/// Checks the bound `dE/dt <= -(a/2) lambda v^2 + (1/a - xi/(2 tau))
/// lambda u_d^2 + (1/a_*) lambda u^2` at every interior sample, with
/// `dE/dt` taken as a centered difference and an `h^2`-scaled slack
/// absorbing the discretization error.
pub fn check_dissipativity(
    traj: &ModalTrajectory,
    p: &SystemParams,
) -> Result<DissipativityReport> {
    let trace = energy_trace(traj, p)?;
    let n = traj.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "trajectory has {n} samples, need at least 3 for differencing"
        )));
    }
    let lambda_k = traj.lambda_k;
    let h = traj.h;
    let m = traj.m();
    let rate_scale = 1.0 + p.a * lambda_k + lambda_k.sqrt();
    let slack_scale = SLACK_COEFF * h * h * rate_scale.powi(3);
    let c_ud = (1.0 / p.a - p.xi / (2.0 * p.tau)) * lambda_k;
    let c_u = lambda_k / p.a_star;

    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut fd_error_max: f64 = 0.0;
    let mut slack_max: f64 = 0.0;
    for i in 1..n - 1 {
        let fd = (trace.total[i + 1] - trace.total[i - 1]) / (2.0 * h);
        let u = traj.u(i);
        let v = traj.v(i);
        let ud = traj.delayed_u(i, m);
        let exact = -p.a * lambda_k * v * v - lambda_k * v * ud
            + lambda_k * u * v
            + p.xi * lambda_k / (2.0 * p.tau) * (u * u - ud * ud);
        let bound = -0.5 * p.a * lambda_k * v * v + c_ud * ud * ud + c_u * u * u;
        let slack = slack_scale * trace.total[i];
        let excess = fd - bound - slack;
        if excess > 0.0 {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
        fd_error_max = fd_error_max.max((fd - exact).abs());
        slack_max = slack_max.max(slack);
    }
    Ok(DissipativityReport {
        checked: n - 2,
        violations,
        max_excess,
        fd_error_max,
        slack_max,
    })
}

/// Spatial snapshots assembled from modal trajectories on an eigenfunction
/// basis.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// `u[i][j]` is the displacement at `times[i]`, `x[j]`.
    pub u: Vec<Vec<f64>>,
    /// Velocity snapshots with the same layout.
    pub ut: Vec<Vec<f64>>,
    /// Kinetic plus potential energy summed over the modes,
    /// `sum of (v_k^2 + lambda_k u_k^2) / 2`.
    pub modal_energy: Vec<f64>,
}

impl WaveField {
    /// Kinetic plus gradient energy evaluated on the grid: trapezoid rule
    /// for `u_t^2 / 2` and cell differences for `u_x^2 / 2`. Agreement
    /// with `modal_energy` is the orthogonality cross-check.
    pub fn grid_energy(&self, t_index: usize) -> f64 {
        let u = &self.u[t_index];
        let ut = &self.ut[t_index];
        let n = self.x.len();
        let mut kinetic = 0.0;
        for j in 0..n - 1 {
            let dx = self.x[j + 1] - self.x[j];
            kinetic += 0.25 * (ut[j] * ut[j] + ut[j + 1] * ut[j + 1]) * dx;
        }
        let mut gradient = 0.0;
        for j in 0..n - 1 {
            let dx = self.x[j + 1] - self.x[j];
            let slope = (u[j + 1] - u[j]) / dx;
            gradient += 0.5 * slope * slope * dx;
        }
        kinetic + gradient
    }
}

/// Combines per-mode trajectories into displacement and velocity snapshots
/// `u(t, x) = sum of u_k(t) phi_k(x)` on `n_x` grid points.
///
/// The mode set must come from an interval problem so the eigenfunctions
/// are available, trajectories must share one step grid, and each
/// trajectory's eigenvalue must match its claimed mode.
pub fn synthesize_wave(
    modes: &ModeSet,
    mode_indices: &[usize],
    trajectories: &[ModalTrajectory],
    n_x: usize,
) -> Result<WaveField> {
    if mode_indices.is_empty() || mode_indices.len() != trajectories.len() {
        return Err(Error::InvalidParameter(format!(
            "got {} mode indices for {} trajectories",
            mode_indices.len(),
            trajectories.len()
        )));
    }
    for (pos, idx) in mode_indices.iter().enumerate() {
        if mode_indices[..pos].contains(idx) {
            return Err(Error::InvalidParameter(format!(
                "mode index {idx} appears twice"
            )));
        }
    }
    if n_x < 3 {
        return Err(Error::InvalidParameter(format!(
            "spatial grid needs at least 3 points, got {n_x}"
        )));
    }
    let length = match modes.origin() {
        ModeOrigin::Dirichlet1d { length } => *length,
        ModeOrigin::Explicit => {
            return Err(Error::InvalidParameter(
                "wave synthesis needs interval modes with eigenfunctions".into(),
            ))
        }
    };
    let first = &trajectories[0];
    for (idx, traj) in mode_indices.iter().zip(trajectories) {
        let lambda_k = modes.lambda(*idx)?;
        if (traj.lambda_k - lambda_k).abs() > 1e-12 * lambda_k {
            return Err(Error::InvalidParameter(format!(
                "trajectory eigenvalue {} does not match mode {idx} \
                 eigenvalue {lambda_k}",
                traj.lambda_k
            )));
        }
        if traj.len() != first.len() || (traj.h - first.h).abs() > 1e-15 {
            return Err(Error::InvalidParameter(
                "trajectories must share one step grid".into(),
            ));
        }
    }

    let x: Vec<f64> = (0..n_x)
        .map(|j| length * j as f64 / (n_x - 1) as f64)
        .collect();
    let mut phi = Vec::with_capacity(mode_indices.len());
    for &idx in mode_indices {
        let col: Result<Vec<f64>> = x.iter().map(|&xj| modes.eigenfunction(idx, xj)).collect();
        phi.push(col?);
    }

    let n_t = first.len();
    let times = first.times();
    let mut u = vec![vec![0.0; n_x]; n_t];
    let mut ut = vec![vec![0.0; n_x]; n_t];
    let mut modal_energy = vec![0.0; n_t];
    for i in 0..n_t {
        for (k, traj) in trajectories.iter().enumerate() {
            let uk = traj.u(i);
            let vk = traj.v(i);
            modal_energy[i] += 0.5 * (vk * vk + traj.lambda_k * uk * uk);
            for j in 0..n_x {
                u[i][j] += uk * phi[k][j];
                ut[i][j] += vk * phi[k][j];
            }
        }
    }

    Ok(WaveField {
        x,
        times,
        u,
        ut,
        modal_energy,
    })
}
