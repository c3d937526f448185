//! CSV and JSON rendering. CSV floats use `{:.16e}` so repeated runs are
//! byte-identical; JSON goes through serde, which turns non-finite floats
//! into null.

use std::fs;
use std::path::Path;

use delaykv::quasipoly::{Root, RootSource};
use delaykv::simulate::EnergyTrace;
use delaykv::spectrum::RegionMap;
use serde::Serialize;

use crate::CliError;

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// One characteristic root in output form. Continuous-spectrum rows carry
/// mode index 0 and an infinite eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct RootRow {
    pub mode_index: usize,
    pub lambda_k: f64,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub source: String,
}

impl RootRow {
    pub fn new(root: &Root) -> Self {
        let (mode_index, lambda_k) = match root.source {
            RootSource::Mode { index, lambda_k } => (index, lambda_k),
            RootSource::Sigma { .. } => (0, f64::INFINITY),
        };
        RootRow {
            mode_index,
            lambda_k,
            re: root.lambda.re,
            im: root.lambda.im,
            residual: root.residual,
            source: root.source.to_string(),
        }
    }
}

pub fn roots_csv(rows: &[RootRow]) -> String {
    let mut out = String::from("mode_index,lambda_k,re,im,residual,source\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.mode_index,
            fmt_f(r.lambda_k),
            fmt_f(r.re),
            fmt_f(r.im),
            fmt_f(r.residual),
            r.source
        ));
    }
    out
}

pub fn energy_csv(trace: &EnergyTrace) -> String {
    let mut out = String::from("t,E,kinetic,potential,history\n");
    for i in 0..trace.times.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f(trace.times[i]),
            fmt_f(trace.total[i]),
            fmt_f(trace.kinetic[i]),
            fmt_f(trace.potential[i]),
            fmt_f(trace.history[i])
        ));
    }
    out
}

pub fn region_csv(map: &RegionMap) -> String {
    let mut out = String::from("a,tau,abscissa,verdict\n");
    for cell in &map.cells {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(cell.a),
            fmt_f(cell.tau),
            fmt_f(cell.abscissa),
            cell.verdict
        ));
    }
    out
}

pub fn sweep_csv(omegas: &[f64], magnitudes: &[f64]) -> String {
    let mut out = String::from("omega,magnitude\n");
    for (w, m) in omegas.iter().zip(magnitudes) {
        out.push_str(&format!("{},{}\n", fmt_f(*w), fmt_f(*m)));
    }
    out
}

pub fn witness_csv(lambda_k: f64, theta: f64, y: f64, a: f64, tau: f64, residual: f64) -> String {
    format!(
        "lambda_k,theta,y,a,tau,residual\n{},{},{},{},{},{}\n",
        fmt_f(lambda_k),
        fmt_f(theta),
        fmt_f(y),
        fmt_f(a),
        fmt_f(tau),
        fmt_f(residual)
    )
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("encoding JSON: {e}")))
}

/// Writes CSV to stdout when no path is given; otherwise writes the file,
/// choosing JSON when the extension is `.json` and CSV otherwise.
pub fn emit(out: Option<&Path>, csv: String, json: String) -> Result<(), CliError> {
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => {
            let body = if path.extension().is_some_and(|e| e == "json") {
                json
            } else {
                csv
            };
            fs::write(path, body)
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
        }
    }
}
