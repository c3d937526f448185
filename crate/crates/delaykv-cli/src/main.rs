//! Command line front end. Subcommands map one-to-one onto the library's
//! entry points: root capture with verdicts, the closed-form continuous
//! spectrum, region maps, marginal witnesses, time integration with energy
//! traces, and imaginary-axis sweeps. Exit code 1 marks rejected input,
//! exit code 2 a computation that started but could not be completed.

mod config;
mod output;
mod svg;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{load_config, FileConfig, WindowConfig};
use delaykv::freqresp::{axis_sweep, tail_threshold};
use delaykv::quasipoly::{default_window, Window, DEFAULT_ROOT_TOL};
use delaykv::simulate::{energy_trace, fit_decay_rate, simulate_mode, DelayHistory};
use delaykv::spectrum::{
    instability_pair, mode_spectrum, region_map, sigma_spectrum, stability_verdict, Verdict,
};
use delaykv::{ModeSet, SystemParams};
use output::{emit, to_json, RootRow};

#[derive(Debug)]
pub enum CliError {
    Lib(delaykv::Error),
    Io(String),
    Config(String),
}

impl From<delaykv::Error> for CliError {
    fn from(e: delaykv::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(s) | CliError::Config(s) => write!(f, "{s}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => {
                if e.is_validation() {
                    1
                } else {
                    2
                }
            }
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "delaykv",
    version,
    about = "Stability laboratory for the wave equation with delayed Kelvin-Voigt damping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic roots of each mode in a window, plus the stability
    /// verdict over modes and continuous spectrum.
    Spectrum(SpectrumArgs),
    /// Continuous-spectrum roots from the Lambert W closed form.
    Sigma(SigmaArgs),
    /// Stability verdicts over an (a, tau) grid.
    Region(RegionArgs),
    /// Parameters past the threshold whose mode has a purely imaginary
    /// characteristic root.
    Instability(InstabilityArgs),
    /// Time integration of one mode with its energy trace.
    Simulate(SimulateArgs),
    /// Transfer function magnitude along the imaginary axis.
    Freqresp(FreqrespArgs),
}

#[derive(clap::Args)]
struct IoArgs {
    /// TOML file with run parameters; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; a .json extension selects JSON, anything else CSV.
    /// CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Writes an SVG plot of the result.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SystemArgs {
    /// Damping coefficient.
    #[arg(long)]
    a: Option<f64>,
    /// Delay.
    #[arg(long)]
    tau: Option<f64>,
    /// History weight in the energy; defaults to 4 tau / a.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(clap::Args)]
struct WindowArgs {
    #[arg(long, allow_negative_numbers = true)]
    re_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    re_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    im_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    im_max: Option<f64>,
    /// Seeding grid resolution per window edge.
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(clap::Args)]
struct SpectrumArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    system: SystemArgs,
    /// Mode eigenvalues, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda_k: Vec<f64>,
    /// Absolute residual tolerance for accepted roots.
    #[arg(long)]
    tol: Option<f64>,
    /// Lambert branches per side for the continuous spectrum.
    #[arg(long)]
    branches: Option<u32>,
    #[command(flatten)]
    window: WindowArgs,
}

#[derive(clap::Args)]
struct SigmaArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    system: SystemArgs,
    /// Lambert branches per side.
    #[arg(long)]
    branches: Option<u32>,
}

#[derive(clap::Args)]
struct RegionArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long)]
    a_min: Option<f64>,
    #[arg(long)]
    a_max: Option<f64>,
    #[arg(long)]
    a_steps: Option<usize>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_steps: Option<usize>,
    /// Mode eigenvalues, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda_k: Vec<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    branches: Option<u32>,
    #[command(flatten)]
    window: WindowArgs,
}

#[derive(clap::Args)]
struct InstabilityArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Mode eigenvalue.
    #[arg(long)]
    lambda_k: Option<f64>,
    /// Angle in (0, pi/2) parametrizing the marginal curve.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    system: SystemArgs,
    /// Mode eigenvalue.
    #[arg(long)]
    lambda_k: Option<f64>,
    /// Initial displacement; the history is constant at this value.
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    /// Initial velocity.
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Steps per delay interval.
    #[arg(long)]
    m: Option<usize>,
    /// Fit window start for the energy decay rate.
    #[arg(long)]
    fit_from: Option<f64>,
    /// Fit window end for the energy decay rate.
    #[arg(long)]
    fit_to: Option<f64>,
}

#[derive(clap::Args)]
struct FreqrespArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    system: SystemArgs,
    /// Mode eigenvalue.
    #[arg(long)]
    lambda_k: Option<f64>,
    /// Sweep limit; defaults to four times the tail threshold.
    #[arg(long)]
    omega_max: Option<f64>,
    /// Grid points per side.
    #[arg(long)]
    points: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Sigma(args) => run_sigma(args),
        Command::Region(args) => run_region(args),
        Command::Instability(args) => run_instability(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Freqresp(args) => run_freqresp(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}

fn require_f(name: &str, flag: Option<f64>, file: Option<f64>) -> Result<f64, CliError> {
    flag.or(file).ok_or_else(|| {
        CliError::Config(format!(
            "missing parameter {name}: pass --{name} or set it in the config"
        ))
    })
}

fn system_params(sys: &SystemArgs, file: &FileConfig) -> Result<SystemParams, CliError> {
    let a = require_f("a", sys.a, file.a)?;
    let tau = require_f("tau", sys.tau, file.tau)?;
    Ok(SystemParams::new(a, tau, sys.xi.or(file.xi))?)
}

fn lambda_list(flag: &[f64], file: &FileConfig) -> Vec<f64> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.lambda_k.clone().unwrap_or_else(|| vec![1.0])
    }
}

fn single_lambda(flag: Option<f64>, file: &FileConfig) -> f64 {
    flag.or_else(|| file.lambda_k.as_ref().and_then(|v| v.first().copied()))
        .unwrap_or(1.0)
}

fn resolve_window(
    base: Window,
    args: &WindowArgs,
    file: Option<&WindowConfig>,
) -> Result<Window, CliError> {
    let empty = WindowConfig::default();
    let fw = file.unwrap_or(&empty);
    let pick = |flag: Option<f64>, conf: Option<f64>, dft: f64| flag.or(conf).unwrap_or(dft);
    Ok(Window::new(
        pick(args.re_min, fw.re_min, base.re_min),
        pick(args.re_max, fw.re_max, base.re_max),
        pick(args.im_min, fw.im_min, base.im_min),
        pick(args.im_max, fw.im_max, base.im_max),
        args.grid_n.or(fw.grid_n).unwrap_or(base.grid_n),
    )?)
}

fn linspace(name: &str, min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 || !min.is_finite() || !max.is_finite() || min >= max {
        return Err(CliError::Config(format!(
            "{name} range [{min}, {max}] with {steps} steps is not usable"
        )));
    }
    Ok((0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect())
}

#[derive(Serialize)]
struct SpectrumJson {
    verdict: String,
    certified: bool,
    abscissa: f64,
    roots: Vec<RootRow>,
}

fn run_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let p = system_params(&args.system, &file)?;
    let modes = ModeSet::from_lambdas(lambda_list(&args.lambda_k, &file))?;
    let tol_abs = args.tol.or(file.tol).unwrap_or(DEFAULT_ROOT_TOL);
    let branches = args.branches.or(file.branches).unwrap_or(4);
    let base = default_window(&p, modes.max_lambda());
    let w = resolve_window(base, &args.window, file.window.as_ref())?;

    let report = stability_verdict(&p, &modes, &w, tol_abs, branches)?;
    let mut rows = Vec::new();
    for k in 1..=modes.len() {
        let spec = mode_spectrum(&p, &modes, k, &w, tol_abs)?;
        rows.extend(spec.roots.iter().map(RootRow::new));
    }
    rows.extend(sigma_spectrum(&p, branches)?.iter().map(RootRow::new));

    eprintln!(
        "verdict: {} ({}); abscissa {:.6e} from {} at {:.6e}{:+.6e}i",
        report.verdict,
        if report.certified {
            "certified by tau <= a"
        } else {
            "numerical"
        },
        report.abscissa,
        report.dominant.source,
        report.dominant.lambda.re,
        report.dominant.lambda.im
    );
    if let Some(path) = &args.io.svg {
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.re, r.im)).collect();
        svg::scatter_plot(
            path,
            "characteristic and continuous-spectrum roots",
            "Re lambda",
            "Im lambda",
            &points,
        )?;
    }
    let json = to_json(&SpectrumJson {
        verdict: report.verdict.to_string(),
        certified: report.certified,
        abscissa: report.abscissa,
        roots: rows.clone(),
    })?;
    emit(args.io.out.as_deref(), output::roots_csv(&rows), json)
}

#[derive(Serialize)]
struct SigmaJson {
    roots: Vec<RootRow>,
}

fn run_sigma(args: SigmaArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let p = system_params(&args.system, &file)?;
    let branches = args.branches.or(file.branches).unwrap_or(4);
    let roots = sigma_spectrum(&p, branches)?;
    let rows: Vec<RootRow> = roots.iter().map(RootRow::new).collect();
    let rightmost = roots
        .iter()
        .map(|r| r.lambda.re)
        .fold(f64::NEG_INFINITY, f64::max);
    eprintln!(
        "{} continuous-spectrum roots, rightmost real part {rightmost:.6e}",
        rows.len()
    );
    if let Some(path) = &args.io.svg {
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.re, r.im)).collect();
        svg::scatter_plot(
            path,
            "continuous-spectrum roots",
            "Re lambda",
            "Im lambda",
            &points,
        )?;
    }
    let json = to_json(&SigmaJson {
        roots: rows.clone(),
    })?;
    emit(args.io.out.as_deref(), output::roots_csv(&rows), json)
}

#[derive(Serialize)]
struct CellJson {
    a: f64,
    tau: f64,
    abscissa: f64,
    verdict: String,
}

#[derive(Serialize)]
struct RegionJson {
    a_axis: Vec<f64>,
    tau_axis: Vec<f64>,
    cells: Vec<CellJson>,
}

fn run_region(args: RegionArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let empty = config::RegionConfig::default();
    let fr = file.region.as_ref().unwrap_or(&empty);
    let a_axis = linspace(
        "a",
        args.a_min.or(fr.a_min).unwrap_or(0.2),
        args.a_max.or(fr.a_max).unwrap_or(2.0),
        args.a_steps.or(fr.a_steps).unwrap_or(20),
    )?;
    let tau_axis = linspace(
        "tau",
        args.tau_min.or(fr.tau_min).unwrap_or(0.2),
        args.tau_max.or(fr.tau_max).unwrap_or(2.0),
        args.tau_steps.or(fr.tau_steps).unwrap_or(20),
    )?;
    let modes = ModeSet::from_lambdas(lambda_list(&args.lambda_k, &file))?;
    let tol_abs = args.tol.or(file.tol).unwrap_or(DEFAULT_ROOT_TOL);
    let branches = args.branches.or(file.branches).unwrap_or(3);
    let im_default = (4.0 * modes.max_lambda().sqrt()).max(8.0 * PI / tau_axis[0]);
    let base = Window::new(-12.0, 2.0, -im_default, im_default, 48)?;
    let w = resolve_window(base, &args.window, file.window.as_ref())?;

    let map = region_map(&a_axis, &tau_axis, &modes, &w, tol_abs, branches)?;
    let mut counts = [0usize; 3];
    for cell in &map.cells {
        counts[match cell.verdict {
            Verdict::Stable => 0,
            Verdict::Unstable => 1,
            Verdict::Indeterminate => 2,
        }] += 1;
    }
    eprintln!(
        "{} cells: {} stable, {} unstable, {} indeterminate",
        map.cells.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    if let Some(path) = &args.io.svg {
        let points: Vec<(f64, f64)> = map
            .cells
            .iter()
            .filter(|c| c.verdict == Verdict::Unstable)
            .map(|c| (c.a, c.tau))
            .collect();
        svg::scatter_plot(path, "unstable cells", "a", "tau", &points)?;
    }
    let json = to_json(&RegionJson {
        a_axis: map.a_axis.clone(),
        tau_axis: map.tau_axis.clone(),
        cells: map
            .cells
            .iter()
            .map(|c| CellJson {
                a: c.a,
                tau: c.tau,
                abscissa: c.abscissa,
                verdict: c.verdict.to_string(),
            })
            .collect(),
    })?;
    emit(args.io.out.as_deref(), output::region_csv(&map), json)
}

#[derive(Serialize)]
struct WitnessJson {
    lambda_k: f64,
    theta: f64,
    y: f64,
    a: f64,
    tau: f64,
    residual: f64,
}

fn run_instability(args: InstabilityArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let lambda_k = single_lambda(args.lambda_k, &file);
    let theta = require_f("theta", args.theta, file.theta)?;
    let pair = instability_pair(lambda_k, theta)?;
    eprintln!(
        "marginal root {:.6e}i for a = {:.6e} < tau = {:.6e}; |g(iy)| = {:.3e}",
        pair.y, pair.a, pair.tau, pair.residual
    );
    if let Some(path) = &args.io.svg {
        svg::scatter_plot(
            path,
            "marginal parameter point",
            "a",
            "tau",
            &[(pair.a, pair.tau)],
        )?;
    }
    let json = to_json(&WitnessJson {
        lambda_k: pair.lambda_k,
        theta: pair.theta,
        y: pair.y,
        a: pair.a,
        tau: pair.tau,
        residual: pair.residual,
    })?;
    emit(
        args.io.out.as_deref(),
        output::witness_csv(
            pair.lambda_k,
            pair.theta,
            pair.y,
            pair.a,
            pair.tau,
            pair.residual,
        ),
        json,
    )
}

#[derive(Serialize)]
struct FitJson {
    rate: f64,
    residual: f64,
    poor_fit: bool,
    samples: usize,
}

#[derive(Serialize)]
struct SimulateJson {
    times: Vec<f64>,
    total: Vec<f64>,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
    history: Vec<f64>,
    warnings: Vec<String>,
    fit: Option<FitJson>,
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let p = system_params(&args.system, &file)?;
    let lambda_k = single_lambda(args.lambda_k, &file);
    let u0 = args.u0.or(file.u0).unwrap_or(1.0);
    let v0 = args.v0.or(file.v0).unwrap_or(0.0);
    let m = args.m.or(file.m).unwrap_or(64);
    let t_final = args.t_final.or(file.t_final).unwrap_or(10.0 * p.tau);

    let history = DelayHistory::constant(p.tau, m, u0)?;
    let traj = simulate_mode(&p, lambda_k, u0, v0, &history, t_final)?;
    for warning in &traj.warnings {
        eprintln!("warning: {warning}");
    }
    let trace = energy_trace(&traj, &p)?;
    let fit = match (args.fit_from, args.fit_to) {
        (Some(from), Some(to)) => {
            let fit = fit_decay_rate(&trace, from, to)?;
            eprintln!(
                "energy decay rate {:.6e} over [{from}, {to}] \
                 (rms residual {:.3e}{})",
                fit.rate,
                fit.residual,
                if fit.poor_fit { ", poor fit" } else { "" }
            );
            Some(FitJson {
                rate: fit.rate,
                residual: fit.residual,
                poor_fit: fit.poor_fit,
                samples: fit.samples,
            })
        }
        _ => None,
    };
    if let Some(path) = &args.io.svg {
        let logs: Vec<f64> = trace.total.iter().map(|e| e.log10()).collect();
        svg::line_plot(
            path,
            "modal energy decay",
            "t",
            "log10 E",
            &trace.times,
            &logs,
        )?;
    }
    let json = to_json(&SimulateJson {
        times: trace.times.clone(),
        total: trace.total.clone(),
        kinetic: trace.kinetic.clone(),
        potential: trace.potential.clone(),
        history: trace.history.clone(),
        warnings: traj.warnings.clone(),
        fit,
    })?;
    emit(args.io.out.as_deref(), output::energy_csv(&trace), json)
}

#[derive(Serialize)]
struct SweepJson {
    omegas: Vec<f64>,
    magnitudes: Vec<f64>,
    sup_value: f64,
    sup_omega: f64,
    unbounded_at: Option<f64>,
    tail_threshold: f64,
}

fn run_freqresp(args: FreqrespArgs) -> Result<(), CliError> {
    let file = load_config(args.io.config.as_deref())?;
    let p = system_params(&args.system, &file)?;
    let lambda_k = single_lambda(args.lambda_k, &file);
    let omega_star = tail_threshold(lambda_k, &p)?;
    let omega_max = args
        .omega_max
        .or(file.omega_max)
        .unwrap_or(4.0 * omega_star);
    let points = args.points.or(file.points).unwrap_or(96);

    let sweep = axis_sweep(&p, lambda_k, omega_max, points)?;
    match sweep.unbounded_at {
        Some(omega) => eprintln!(
            "|H| is unbounded: axis root at omega = {omega:.9e} \
             (tail threshold {omega_star:.6e})"
        ),
        None => eprintln!(
            "sup |H| = {:.6e} at omega = {:.6e} (tail threshold {omega_star:.6e})",
            sweep.sup_value, sweep.sup_omega
        ),
    }
    if let Some(path) = &args.io.svg {
        let logs: Vec<f64> = sweep.magnitudes.iter().map(|m| m.log10()).collect();
        svg::line_plot(
            path,
            "transfer function on the imaginary axis",
            "omega",
            "log10 |H|",
            &sweep.omegas,
            &logs,
        )?;
    }
    let json = to_json(&SweepJson {
        omegas: sweep.omegas.clone(),
        magnitudes: sweep.magnitudes.clone(),
        sup_value: sweep.sup_value,
        sup_omega: sweep.sup_omega,
        unbounded_at: sweep.unbounded_at,
        tail_threshold: omega_star,
    })?;
    emit(
        args.io.out.as_deref(),
        output::sweep_csv(&sweep.omegas, &sweep.magnitudes),
        json,
    )
}
