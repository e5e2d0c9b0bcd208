use crate::error::{Error, Result};
use crate::expo_poly::ExpPoly;

/// `y'(t) = a·y(t) + b·y'(t-τ) + c·y(t-τ)` for `t > 0`, with `y = H` on `[-τ, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NddeProblem {
    a: f64,
    b: f64,
    c: f64,
    tau: f64,
    history: ExpPoly,
}

impl NddeProblem {
    pub fn new(a: f64, b: f64, c: f64, tau: f64, history: ExpPoly) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidProblem("coefficients and delay must be finite".into()));
        }
        if b == 0.0 {
            return Err(Error::InvalidProblem(
                "b must be nonzero (neutral term required)".into(),
            ));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidProblem(format!("delay must be positive, got {tau}")));
        }
        Ok(Self { a, b, c, tau, history })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn history(&self) -> &ExpPoly {
        &self.history
    }

    /// `ab + c`; the original and modified residue expansions coincide, and the
    /// asymptotic poles are exact, when this vanishes.
    pub fn mismatch(&self) -> f64 {
        self.a * self.b + self.c
    }

    /// `ln|b| / τ`, the abscissa the complex pole ladder approaches.
    pub fn growth_rate(&self) -> f64 {
        self.b.abs().ln() / self.tau
    }

    /// Whether the ladder sits on even (`b > 0`) or odd (`b < 0`) multiples of `π/τ`.
    pub fn parity(&self) -> Parity {
        if self.b > 0.0 {
            Parity::Full
        } else {
            Parity::Odd
        }
    }

    /// Ladder frequency `α_k`: `2kπ/τ` for `b > 0`, `(2k-1)π/τ` for `b < 0`.
    pub fn frequency(&self, k: usize) -> f64 {
        let k = k as f64;
        match self.parity() {
            Parity::Full => 2.0 * k * std::f64::consts::PI / self.tau,
            Parity::Odd => (2.0 * k - 1.0) * std::f64::consts::PI / self.tau,
        }
    }
}

/// Harmonic content of the pole ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// All multiples of the base frequency `2π/τ` (`b > 0`).
    Full,
    /// Odd multiples of `π/τ` only (`b < 0`).
    Odd,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_problems() {
        let h = ExpPoly::constant(1.0);
        assert!(NddeProblem::new(1.0, 0.0, 1.0, 1.0, h.clone()).is_err());
        assert!(NddeProblem::new(1.0, 0.5, 1.0, 0.0, h.clone()).is_err());
        assert!(NddeProblem::new(1.0, 0.5, 1.0, -2.0, h.clone()).is_err());
        assert!(NddeProblem::new(f64::NAN, 0.5, 1.0, 1.0, h).is_err());
    }

    #[test]
    fn frequencies_follow_sign_of_b() {
        let h = ExpPoly::zero();
        let even = NddeProblem::new(0.0, 0.9, 0.0, 2.0, h.clone()).unwrap();
        assert!((even.frequency(3) - 3.0 * std::f64::consts::PI).abs() < 1e-15);
        let odd = NddeProblem::new(0.0, -0.9, 0.0, 1.0, h).unwrap();
        assert!((odd.frequency(1) - std::f64::consts::PI).abs() < 1e-15);
        assert!((odd.frequency(2) - 3.0 * std::f64::consts::PI).abs() < 1e-15);
    }
}
