//! TOML run configuration. Every entry is optional; command line flags
//! override file entries, and unknown keys are rejected so typos surface
//! instead of silently falling back to defaults.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a: Option<f64>,
    pub tau: Option<f64>,
    pub xi: Option<f64>,
    pub lambda_k: Option<Vec<f64>>,
    pub theta: Option<f64>,
    pub t_final: Option<f64>,
    pub m: Option<usize>,
    pub u0: Option<f64>,
    pub v0: Option<f64>,
    pub branches: Option<u32>,
    pub omega_max: Option<f64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub window: Option<WindowConfig>,
    pub region: Option<RegionConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub re_min: Option<f64>,
    pub re_max: Option<f64>,
    pub im_min: Option<f64>,
    pub im_max: Option<f64>,
    pub grid_n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_steps: Option<usize>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_steps: Option<usize>,
}

pub fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", p.display())))
        }
    }
}
