use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use tgc_core::{Budget, Method, TGrid};

use crate::error::{CliError, Result};

pub const MIN_MC_SAMPLES: u64 = 1000;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// `--t-grid`: a point count for a uniform grid, or an explicit list.
#[derive(Clone, Debug, PartialEq)]
pub enum GridArg {
    Count(usize),
    Points(Vec<f64>),
}

impl Default for GridArg {
    fn default() -> Self {
        GridArg::Count(tgc_core::capacity::DEFAULT_GRID_POINTS)
    }
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if !s.contains(',') {
            if let Ok(count) = s.parse::<usize>() {
                return Ok(GridArg::Count(count));
            }
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("'{p}' is neither a point count nor a number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GridArg::Points)
    }
}

impl GridArg {
    pub fn resolve(&self) -> Result<TGrid> {
        let grid = match self {
            GridArg::Count(count) => TGrid::uniform(*count),
            GridArg::Points(points) => TGrid::from_points(points.clone()),
        };
        grid.map_err(|e| CliError::Config(format!("--t-grid: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    /// Relative tolerance for deterministic estimates; `None` keeps the
    /// per-quantity defaults.
    pub tolerance: Option<f64>,
    pub mc_samples: u64,
    pub seed: u64,
    pub t_grid: GridArg,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            tolerance: None,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
            t_grid: GridArg::default(),
            output: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Config(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
        }
        if self.mc_samples < MIN_MC_SAMPLES {
            return Err(CliError::Config(format!(
                "--mc-samples must be at least {MIN_MC_SAMPLES}, got {}",
                self.mc_samples
            )));
        }
        self.t_grid.resolve().map(|_| ())
    }

    pub fn budget(&self) -> Budget {
        Budget {
            tolerance: self.tolerance,
            samples: self.mc_samples,
            seed: self.seed,
            ..Budget::default()
        }
    }
}
