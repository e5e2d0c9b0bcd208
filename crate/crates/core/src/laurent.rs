//! Truncated Laurent series in a small variable `w`.
//!
//! A series stores the coefficients of `w^v, …, w^{P-1}`, where `v` is the
//! valuation and `P` the precision: everything from `w^P` on is unknown.
//! Arithmetic propagates precision the usual way, so results never claim
//! more terms than their inputs determine.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Expansion variable of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    /// `w = 1/s`.
    InverseS,
    /// `w = 1/(iα)`, the expansion about the pole abscissa.
    InverseIAlpha,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    variable: Variable,
    valuation: i32,
    coeffs: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl TruncatedSeries {
    /// Series `Σ coeffs[j]·w^{valuation + j}`, known through `w^{valuation + len - 1}`.
    pub fn new(variable: Variable, valuation: i32, coeffs: Vec<Complex64>) -> Self {
        Self {
            variable,
            valuation,
            coeffs,
        }
    }

    /// Like [`TruncatedSeries::new`] but exact through `w^{precision-1}`,
    /// padding with zeros.
    pub fn with_precision(variable: Variable, valuation: i32, mut coeffs: Vec<Complex64>, precision: i32) -> Self {
        let len = (precision - valuation).max(0) as usize;
        coeffs.resize(len, ZERO);
        Self::new(variable, valuation, coeffs)
    }

    /// The real polynomial `Σ coeffs[j]·w^{valuation + j}`, exact through `w^{precision-1}`.
    pub fn from_real(variable: Variable, valuation: i32, coeffs: &[f64], precision: i32) -> Self {
        Self::with_precision(
            variable,
            valuation,
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            precision,
        )
    }

    /// `value·w^power`, exact through `w^{precision-1}`.
    pub fn monomial(variable: Variable, power: i32, value: Complex64, precision: i32) -> Self {
        Self::with_precision(variable, power, vec![value], precision)
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn valuation(&self) -> i32 {
        self.valuation
    }

    /// First unknown power of `w`.
    pub fn precision(&self) -> i32 {
        self.valuation + self.coeffs.len() as i32
    }

    /// Highest power of `1/w` present, i.e. `-valuation`.
    pub fn top_power(&self) -> i32 {
        -self.valuation
    }

    /// Number of known coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `w^power`; zero below the valuation, `None` at or beyond the precision.
    pub fn coefficient(&self, power: i32) -> Option<Complex64> {
        if power >= self.precision() {
            None
        } else if power < self.valuation {
            Some(ZERO)
        } else {
            Some(self.coeffs[(power - self.valuation) as usize])
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Drops exactly-zero leading coefficients, raising the valuation.
    pub fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| **c == ZERO).count();
        self.coeffs.drain(..lead);
        self.valuation += lead as i32;
        self
    }

    /// Forgets everything from `w^precision` on.
    pub fn truncate(mut self, precision: i32) -> Self {
        if precision < self.precision() {
            let len = (precision - self.valuation).max(0) as usize;
            self.coeffs.truncate(len);
        }
        self
    }

    /// Removes the terms below `w^power`, returning the series and the
    /// largest discarded magnitude.
    pub fn discard_below(mut self, power: i32) -> (Self, f64) {
        if power <= self.valuation {
            return (self, 0.0);
        }
        let count = ((power - self.valuation) as usize).min(self.coeffs.len());
        let dropped = self.coeffs.drain(..count).map(|c| c.norm()).fold(0.0, f64::max);
        self.valuation = power;
        (self, dropped)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(
            self.variable,
            self.valuation,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }

    /// Sum of the known terms at `w`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let tail = self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * w + c);
        tail * w.powi(self.valuation)
    }

    fn check_variable(&self, other: &Self) -> Result<()> {
        if self.variable == other.variable {
            Ok(())
        } else {
            Err(Error::IncompatibleVariable)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_variable(other)?;
        let valuation = self.valuation.min(other.valuation);
        let precision = self.precision().min(other.precision());
        let coeffs = (valuation..precision)
            .map(|n| self.coefficient(n).unwrap_or(ZERO) + other.coefficient(n).unwrap_or(ZERO))
            .collect();
        Ok(Self::new(self.variable, valuation, coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_variable(other)?;
        let valuation = self.valuation + other.valuation;
        let precision = (self.valuation + other.precision()).min(other.valuation + self.precision());
        let len = (precision - valuation).max(0) as usize;
        let mut coeffs = vec![ZERO; len];
        for (n, out) in coeffs.iter_mut().enumerate() {
            for i in 0..=n {
                if let (Some(x), Some(y)) = (self.coeffs.get(i), other.coeffs.get(n - i)) {
                    *out += x * y;
                }
            }
        }
        Ok(Self::new(self.variable, valuation, coeffs))
    }

    /// Long division; the divisor's leading stored coefficient must be nonzero
    /// once exact zeros are stripped.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_variable(other)?;
        let divisor = other.clone().normalized();
        let Some(&lead) = divisor.coeffs.first() else {
            return Err(Error::ZeroLeadingDivisor);
        };
        let valuation = self.valuation - divisor.valuation;
        let len = self.coeffs.len().min(divisor.coeffs.len());
        let mut q: Vec<Complex64> = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = self.coeffs[n];
            for j in 1..=n {
                acc -= divisor.coeffs[j] * q[n - j];
            }
            q.push(acc / lead);
        }
        Ok(Self::new(self.variable, valuation, q))
    }

    pub fn try_reciprocal(&self) -> Result<Self> {
        let precision = self.order() as i32;
        Self::monomial(self.variable, 0, Complex64::new(1.0, 0.0), precision).try_div(self)
    }
}

macro_rules! series_op {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait for &TruncatedSeries {
            type Output = TruncatedSeries;
            /// Panics if the operands use different variables; see the `try_` form.
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$inner(rhs).expect("series in different variables")
            }
        }

        impl $trait for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

/// Generalized binomial coefficient `C(n, j)` for integer `n` of either sign.
pub fn binomial(n: i32, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n as f64 - i as f64) / (i + 1) as f64)
}

/// Expansion of `num(s)/den(s)` in `w = 1/s` through `w^{max_power}`.
///
/// Polynomials are given by ascending coefficients in `s`.
pub fn expand_rational(num: &[f64], den: &[f64], max_power: i32) -> Result<TruncatedSeries> {
    let as_series = |p: &[f64]| {
        let top = p.iter().rposition(|&c| c != 0.0);
        match top {
            None => TruncatedSeries::with_precision(Variable::InverseS, 0, Vec::new(), 0),
            Some(d) => {
                let reversed: Vec<f64> = p[..=d].iter().rev().copied().collect();
                // Exact polynomials: give them enough known terms for the quotient.
                let precision = max_power + d as i32 + p.len() as i32 + 2;
                TruncatedSeries::from_real(Variable::InverseS, -(d as i32), &reversed, precision)
            }
        }
    };
    let n = as_series(num);
    let d = as_series(den);
    if d.coefficients().iter().all(|c| *c == ZERO) {
        return Err(Error::ZeroLeadingDivisor);
    }
    Ok(n.try_div(&d)?.truncate(max_power + 1))
}

/// Re-expands a series in `1/s` about `s = σ₀ + iα`, as a series in
/// `w = 1/(iα)` through `w^{max_power}`.
///
/// Uses `1/s = w/(1 + σ₀w)`, so `s^{-m} = w^m·Σ_j C(-m, j)·σ₀^j·w^j`.
pub fn recentre(x: &TruncatedSeries, sigma0: f64, max_power: i32) -> Result<TruncatedSeries> {
    if x.variable() != Variable::InverseS {
        return Err(Error::IncompatibleVariable);
    }
    let precision = x.precision().min(max_power + 1);
    let valuation = x.valuation();
    let len = (precision - valuation).max(0) as usize;
    let mut coeffs = vec![ZERO; len];
    for (i, c) in x.coefficients().iter().enumerate() {
        let m = valuation + i as i32;
        for j in 0..len {
            let power = m + j as i32;
            if power >= precision {
                break;
            }
            let weight = binomial(-m, j) * sigma0.powi(j as i32);
            coeffs[(power - valuation) as usize] += c * weight;
        }
    }
    Ok(TruncatedSeries::new(Variable::InverseIAlpha, valuation, coeffs))
}
