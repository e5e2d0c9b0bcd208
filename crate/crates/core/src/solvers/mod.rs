//! Solution methods: the exact method of steps and the three residue series.

mod mos;
mod series;

use std::fmt;
use std::str::FromStr;

pub use mos::{method_of_steps, MosSolution, MAX_SEGMENT_MONOMIALS};
pub use series::{solve_modified_lf, solve_original_lf, solve_pure_laplace, solve_series, SeriesSolution};

use crate::error::{Error, Result};
use crate::problem::NddeProblem;
use crate::tail::MAX_TAIL_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mos,
    PureLaplace,
    OriginalLf,
    ModifiedLf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mos, Method::PureLaplace, Method::OriginalLf, Method::ModifiedLf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mos => "mos",
            Method::PureLaplace => "pure",
            Method::OriginalLf => "original",
            Method::ModifiedLf => "modified",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mos" => Ok(Method::Mos),
            "pure" | "laplace" | "pure-laplace" => Ok(Method::PureLaplace),
            "original" | "original-lf" => Ok(Method::OriginalLf),
            "modified" | "modified-lf" => Ok(Method::ModifiedLf),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected mos, pure, original or modified)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub method: Method,
    /// Ladder poles summed explicitly.
    pub n: usize,
    /// Order of the residue expansion.
    pub m: usize,
}

impl SolverConfig {
    pub const DEFAULT_TERMS: usize = 50;
    pub const DEFAULT_ORDER: usize = 8;

    pub fn new(method: Method, n: usize, m: usize) -> Self {
        Self { method, n, m }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if !(2..=MAX_TAIL_ORDER).contains(&self.m) {
            return Err(Error::InvalidArgument(format!(
                "expansion order must lie in 2..={MAX_TAIL_ORDER}, got {}",
                self.m
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(Method::ModifiedLf, Self::DEFAULT_TERMS, Self::DEFAULT_ORDER)
    }
}

/// A solution from any method.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Mos(MosSolution),
    Series(Box<SeriesSolution>),
}

impl Solution {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match self {
            Solution::Mos(s) => s.evaluate(t),
            Solution::Series(s) => Ok(s.evaluate(t)),
        }
    }
}

/// Solves with the configured method; `horizon` bounds the method of steps.
pub fn solve(p: &NddeProblem, config: &SolverConfig, horizon: f64) -> Result<Solution> {
    match config.method {
        Method::Mos => method_of_steps(p, horizon).map(Solution::Mos),
        _ => solve_series(p, config).map(|s| Solution::Series(Box::new(s))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("euler".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig::new(Method::ModifiedLf, 0, 8).validate().is_err());
        assert!(SolverConfig::new(Method::ModifiedLf, 5, 13).validate().is_err());
        assert!(SolverConfig::new(Method::ModifiedLf, 5, 1).validate().is_err());
    }
}
