//! Problem configuration: a flat `key = value` file (TOML syntax) with the
//! history as a quoted expression.
//!
//! ```toml
//! a = -2.1
//! b = 0.9
//! c = 2.12
//! tau = 1.0
//! history = "2 - 48*t*(1 + t)"
//! method = "modified"
//! n = 50
//! ```

use std::path::{Path, PathBuf};

use ndde_core::{parse_function, Method, NddeProblem, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Grids with more points than this are refused.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tau: f64,
    pub history: String,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_method() -> String {
    Method::ModifiedLf.name().to_string()
}

fn default_n() -> usize {
    SolverConfig::DEFAULT_TERMS
}

fn default_m() -> usize {
    SolverConfig::DEFAULT_ORDER
}

fn default_t_max() -> f64 {
    10.0
}

fn default_grid_step() -> f64 {
    1e-3
}

impl ProblemConfig {
    pub fn new(a: f64, b: f64, c: f64, tau: f64, history: &str) -> Self {
        Self {
            a,
            b,
            c,
            tau,
            history: history.to_string(),
            method: default_method(),
            n: default_n(),
            m: default_m(),
            t_max: default_t_max(),
            grid_step: default_grid_step(),
            out: None,
        }
    }

    /// The three worked examples.
    pub fn example(index: usize) -> Option<Self> {
        match index {
            1 => Some(Self::new(-2.1, 0.9, 2.12, 1.0, "2 - 48*t*(1 + t)")),
            2 => Some(Self::new(-2.1, 7.0 / 11.0, -2.0, 2.0, "1 + 3/2*(t + 2)*(0.5 + t)")),
            3 => Some(Self::new(14.0 / 33.0, -8.0 / 9.0, -1.0 / 3.0, 1.0, "3 - 2*cos(14*t)")),
            _ => None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config fields are plain scalars")
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        self.method()?;
        self.solver_config()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(HarnessError::Config(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return Err(HarnessError::Config(format!(
                "grid_step must be positive, got {}",
                self.grid_step
            )));
        }
        if self.t_max / self.grid_step > MAX_GRID_POINTS as f64 {
            return Err(HarnessError::Config(format!(
                "grid of {} points exceeds the limit of {MAX_GRID_POINTS}",
                self.t_max / self.grid_step
            )));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<NddeProblem> {
        let history = parse_function(&self.history)
            .map_err(|e| HarnessError::Config(format!("history `{}`: {e}", self.history)))?;
        NddeProblem::new(self.a, self.b, self.c, self.tau, history).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn method(&self) -> Result<Method> {
        self.method
            .parse()
            .map_err(|e: ndde_core::Error| HarnessError::Config(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig::new(self.method().unwrap_or(Method::ModifiedLf), self.n, self.m)
    }

    /// `t_i = i·grid_step` for `0 ≤ t_i ≤ t_max` (the endpoint is included
    /// when it falls on the grid to rounding).
    pub fn grid(&self) -> Vec<f64> {
        let count = (self.t_max / self.grid_step * (1.0 + 1e-12)).floor() as usize;
        (0..=count).map(|i| i as f64 * self.grid_step).collect()
    }
}
