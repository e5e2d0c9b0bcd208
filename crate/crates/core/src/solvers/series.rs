//! Residue-series solutions.
//!
//! `y(t) = Σ_real c·e^{rt} + Σ_pairs 2Re(c·e^{rt})` over the real roots, the
//! base-band pair and the ladder `k = 1..N`. The accelerated variants add
//! the closed-form tail of `Σ_{k≥1} 2Re(c_k^a e^{s_k t})` and subtract its
//! first `N` terms, so only the differences `c_k e^{r_k t} - c_k^a e^{s_k t}`
//! are summed explicitly.

use num_complex::Complex64;

use crate::charroots::{asymptotic_pole, build_pole_family, PoleFamily};
use crate::error::{Error, Result};
use crate::problem::NddeProblem;
use crate::residues::{asymptotic_residue, expansion, residue_at, ExpansionMode, Residue, ResidueAsymptotics};
use crate::tail::{tail_component, TailComponent};

use super::{Method, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    method: Method,
    real: Vec<Residue>,
    pairs: Vec<Residue>,
    subtracted: Vec<Residue>,
    tail: Option<TailComponent>,
    asymptotics: Option<ResidueAsymptotics>,
    family: PoleFamily,
}

impl SeriesSolution {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn family(&self) -> &PoleFamily {
        &self.family
    }

    pub fn real_residues(&self) -> &[Residue] {
        &self.real
    }

    /// Base-band and ladder residues (upper members of conjugate pairs).
    pub fn pair_residues(&self) -> &[Residue] {
        &self.pairs
    }

    pub fn asymptotics(&self) -> Option<&ResidueAsymptotics> {
        self.asymptotics.as_ref()
    }

    pub fn tail(&self) -> Option<&TailComponent> {
        self.tail.as_ref()
    }

    /// The sum before taking the real part; its imaginary part measures
    /// how well conjugate symmetry held.
    pub fn evaluate_complex(&self, t: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for r in &self.real {
            sum += r.value * (r.pole * t).exp();
        }
        for r in &self.pairs {
            let term = r.value * (r.pole * t).exp();
            sum += term + term.conj();
        }
        for r in &self.subtracted {
            let term = r.value * (r.pole * t).exp();
            sum -= term + term.conj();
        }
        if let Some(tail) = &self.tail {
            sum += tail.eval(t);
        }
        sum
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.evaluate_complex(t).re
    }
}

fn pole_residues<'a>(p: &NddeProblem, poles: impl Iterator<Item = &'a crate::charroots::Pole>) -> Result<Vec<Residue>> {
    poles.map(|pole| residue_at(p, pole)).collect()
}

/// Series solution for the configured method; fails for [`Method::Mos`].
pub fn solve_series(p: &NddeProblem, config: &SolverConfig) -> Result<SeriesSolution> {
    config.validate()?;
    let mode = match config.method {
        Method::Mos => {
            return Err(Error::InvalidArgument(
                "the method of steps is not a series method".into(),
            ))
        }
        Method::PureLaplace => None,
        Method::OriginalLf => Some(ExpansionMode::Original),
        Method::ModifiedLf => Some(ExpansionMode::Modified),
    };
    let family = build_pole_family(p, config.n)?;
    if let Some(pole) = family.real_poles.iter().find(|r| r.multiplicity > 1) {
        return Err(Error::MultiplePole(pole.value));
    }
    let real = pole_residues(p, family.real_poles.iter())?;
    let pairs = pole_residues(p, family.base_poles.iter().chain(&family.complex_poles))?;

    let (subtracted, tail, asymptotics) = match mode {
        None => (Vec::new(), None, None),
        Some(mode) => {
            let asymptotics = expansion(p, config.m, mode)?;
            let subtracted = (1..=config.n)
                .map(|k| Residue {
                    pole: asymptotic_pole(p, k),
                    value: asymptotic_residue(p, k, &asymptotics),
                })
                .collect();
            let tail = tail_component(p, &asymptotics)?;
            (subtracted, Some(tail), Some(asymptotics))
        }
    };
    Ok(SeriesSolution {
        method: config.method,
        real,
        pairs,
        subtracted,
        tail,
        asymptotics,
        family,
    })
}

pub fn solve_pure_laplace(p: &NddeProblem, n: usize) -> Result<SeriesSolution> {
    solve_series(
        p,
        &SolverConfig::new(Method::PureLaplace, n, SolverConfig::DEFAULT_ORDER),
    )
}

pub fn solve_original_lf(p: &NddeProblem, n: usize, m: usize) -> Result<SeriesSolution> {
    solve_series(p, &SolverConfig::new(Method::OriginalLf, n, m))
}

pub fn solve_modified_lf(p: &NddeProblem, n: usize, m: usize) -> Result<SeriesSolution> {
    solve_series(p, &SolverConfig::new(Method::ModifiedLf, n, m))
}
