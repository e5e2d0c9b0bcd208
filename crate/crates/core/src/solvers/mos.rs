//! Exact method of steps.
//!
//! On segment `m`, `t = mτ + u` with `u ∈ [0, τ]`, the equation reads
//! `y_m' = a·y_m + b·z' + c·z` with `z = y_{m-1}` (or the shifted history for
//! `m = 0`). The forcing is an exponential polynomial, so each segment is
//! solved in closed form and stays one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expo_poly::{exp_antiderivative, Antiderivative, ExpPoly, ExpTerm};
use crate::problem::NddeProblem;

/// Upper bound on monomials per segment before giving up.
pub const MAX_SEGMENT_MONOMIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MosSolution {
    problem: NddeProblem,
    segments: Vec<ExpPoly>,
}

/// Solves `y' = a·y + g(u)`, `y(0) = y0`, in closed form.
fn solve_linear(a: f64, forcing: &ExpPoly, y0: f64) -> ExpPoly {
    let a_c = Complex64::new(a, 0.0);
    let mut terms = Vec::with_capacity(forcing.terms().len() + 1);
    let mut at_zero = Complex64::new(0.0, 0.0);
    for term in forcing.terms() {
        let mu = term.lambda - a_c;
        let scale = term.lambda.norm().max(a.abs());
        match exp_antiderivative(&term.poly, mu, scale) {
            Antiderivative::Exponential(q) => {
                at_zero += q.first().copied().unwrap_or_default();
                terms.push(ExpTerm::new(q, term.lambda));
            }
            Antiderivative::Resonant(q) => {
                at_zero += q.first().copied().unwrap_or_default();
                terms.push(ExpTerm::new(q, a_c));
            }
        }
    }
    terms.push(ExpTerm::new(vec![Complex64::new(y0, 0.0) - at_zero], a_c));
    ExpPoly::from_terms(terms)
}

/// Builds segments until `horizon` is covered.
pub fn method_of_steps(p: &NddeProblem, horizon: f64) -> Result<MosSolution> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be finite and nonnegative, got {horizon}"
        )));
    }
    let tau = p.tau();
    let count = ((horizon / tau).ceil() as usize).max(1);
    let mut segments: Vec<ExpPoly> = Vec::with_capacity(count);
    let mut previous = p.history().shift(-tau);
    let mut start = p.history().eval(0.0);
    for index in 0..count {
        let forcing = previous.derivative().scale_real(p.b()) + previous.scale_real(p.c());
        let segment = solve_linear(p.a(), &forcing, start);
        let terms = segment.monomial_count();
        if terms > MAX_SEGMENT_MONOMIALS {
            return Err(Error::ExpressionSwell {
                segment: index,
                terms,
                limit: MAX_SEGMENT_MONOMIALS,
            });
        }
        start = segment.eval(tau);
        previous = segment.clone();
        segments.push(segment);
    }
    Ok(MosSolution {
        problem: p.clone(),
        segments,
    })
}

impl MosSolution {
    pub fn segments(&self) -> &[ExpPoly] {
        &self.segments
    }

    /// End of the last segment.
    pub fn horizon(&self) -> f64 {
        self.segments.len() as f64 * self.problem.tau()
    }

    fn locate(&self, t: f64) -> Result<Option<(usize, f64)>> {
        let tau = self.problem.tau();
        if t < 0.0 {
            return Ok(None);
        }
        let horizon = self.horizon();
        if t > horizon * (1.0 + 1e-12) || t.is_nan() {
            return Err(Error::HorizonExceeded { t, horizon });
        }
        let index = ((t / tau).floor() as usize).min(self.segments.len() - 1);
        Ok(Some((index, t - index as f64 * tau)))
    }

    /// `y(t)`; the history for `t < 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        Ok(match self.locate(t)? {
            None => self.problem.history().eval(t),
            Some((m, u)) => self.segments[m].eval(u),
        })
    }

    /// `y'(t)`, taken from the right at segment boundaries.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        Ok(match self.locate(t)? {
            None => self.problem.history().derivative().eval(t),
            Some((m, u)) => self.segments[m].derivative().eval(u),
        })
    }

    /// Largest `|y_m' - a·y_m - b·z' - c·z|` over `samples` points per segment.
    pub fn max_residual(&self, samples: usize) -> f64 {
        let p = &self.problem;
        let tau = p.tau();
        let mut previous = p.history().shift(-tau);
        let mut worst: f64 = 0.0;
        for segment in &self.segments {
            let ds = segment.derivative();
            let dz = previous.derivative();
            for i in 0..=samples {
                let u = tau * i as f64 / samples.max(1) as f64;
                let r = ds.eval(u) - p.a() * segment.eval(u) - p.b() * dz.eval(u) - p.c() * previous.eval(u);
                worst = worst.max(r.abs());
            }
            previous = segment.clone();
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_function;
    use approx::assert_relative_eq;

    #[test]
    fn pure_exponential_decay() {
        // With H = e^{-t} and b = c the delayed terms cancel: y = e^{-t}.
        let p = NddeProblem::new(-1.0, 0.5, 0.5, 1.0, parse_function("exp(-t)").unwrap()).unwrap();
        let sol = method_of_steps(&p, 3.0).unwrap();
        for t in [0.0, 0.3, 1.0, 2.5, 3.0] {
            assert_relative_eq!(sol.evaluate(t).unwrap(), (-t).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn first_segment_by_hand() {
        // a = 0, b = 0, c = 1, H = 1: y = 1 + t on [0, τ].
        let p = NddeProblem::new(0.0, 1e-300, 1.0, 1.0, ExpPoly::constant(1.0)).unwrap();
        let sol = method_of_steps(&p, 1.0).unwrap();
        assert_relative_eq!(sol.evaluate(0.5).unwrap(), 1.5, epsilon = 1e-14);
        // Second segment: y' = 1 + (t - 1) → y = 2 + (t - 1) + (t - 1)²/2.
        let sol = method_of_steps(&p, 2.0).unwrap();
        assert_relative_eq!(sol.evaluate(1.5).unwrap(), 2.625, epsilon = 1e-14);
    }

    #[test]
    fn continuity_and_residual() {
        let h = parse_function("2 - 48*t*(1 + t)").unwrap();
        let p = NddeProblem::new(-2.1, 0.9, 2.12, 1.0, h).unwrap();
        let sol = method_of_steps(&p, 10.0).unwrap();
        assert_eq!(sol.segments().len(), 10);
        for m in 1..10 {
            let t = m as f64;
            let left = sol.segments()[m - 1].eval(1.0);
            let right = sol.segments()[m].eval(0.0);
            assert!((left - right).abs() <= 1e-12 * left.abs().max(1.0));
            assert_eq!(sol.evaluate(t).unwrap(), right);
        }
        assert!(sol.max_residual(50) < 1e-8);
    }

    #[test]
    fn resonant_forcing() {
        // H = e^{-t}, a = -1: the forcing resonates with the homogeneous part.
        let h = parse_function("exp(-t)").unwrap();
        let p = NddeProblem::new(-1.0, 0.5, 0.7, 1.0, h).unwrap();
        let sol = method_of_steps(&p, 4.0).unwrap();
        assert!(sol.max_residual(40) < 1e-10);
        assert_relative_eq!(sol.evaluate(0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn horizon_is_enforced() {
        let p = NddeProblem::new(-1.0, 0.5, 0.0, 1.0, ExpPoly::constant(1.0)).unwrap();
        let sol = method_of_steps(&p, 2.0).unwrap();
        assert!(sol.evaluate(2.0).is_ok());
        assert!(matches!(sol.evaluate(2.5), Err(Error::HorizonExceeded { .. })));
        assert_eq!(sol.evaluate(-0.5).unwrap(), 1.0);
    }
}
