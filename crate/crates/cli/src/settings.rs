//! JSON config file merged under the command-line flags.

use crate::args::{Common, Scheme};
use crate::error::{CliError, CliResult};
use loewner_core::NumericConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Every entry is optional; flags win over entries.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub numeric: Option<NumericConfig>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub stamp: Option<bool>,
    pub driving: Option<String>,
    pub curve: Option<String>,
    pub points: Option<usize>,
    pub scheme: Option<Scheme>,
    pub z: Option<String>,
    pub t: Option<f64>,
    pub t_grid: Option<String>,
    pub c: Option<f64>,
    pub arc_oracle: Option<bool>,
    pub interval: Option<bool>,
    pub theorem: Option<u8>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Resolved options shared by all commands.
pub struct Settings {
    pub numeric: NumericConfig,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub stamp: bool,
    pub file: FileConfig,
}

impl Settings {
    pub fn resolve(common: &Common) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut numeric = file.numeric.clone().unwrap_or_default();
        if let Some(v) = common.rel_tol {
            numeric.ode_rel_tol = v;
        }
        if let Some(v) = common.abs_tol {
            numeric.ode_abs_tol = v;
        }
        if let Some(v) = common.newton_tol {
            numeric.newton_tol = v;
        }
        if let Some(v) = common.weld_steps {
            numeric.weld_steps = v;
        }
        numeric.validate()?;
        Ok(Settings {
            numeric,
            out: common.out.clone().or_else(|| file.out.clone()),
            plot: common.plot.clone().or_else(|| file.plot.clone()),
            stamp: common.stamp || file.stamp.unwrap_or(false),
            file,
        })
    }

    pub fn stamp_line(&self) -> Option<String> {
        self.stamp.then(|| format!("loewner-lab {}", env!("CARGO_PKG_VERSION")))
    }
}

/// Flag value, else config entry, else an error naming the missing flag.
pub fn required<T: Clone>(flag: Option<T>, file: &Option<T>, name: &str) -> CliResult<T> {
    flag.or_else(|| file.clone()).ok_or_else(|| CliError::usage(format!("missing --{name}")))
}

pub fn optional<T: Clone>(flag: Option<T>, file: &Option<T>) -> Option<T> {
    flag.or_else(|| file.clone())
}
