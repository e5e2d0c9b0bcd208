//! Exact algebra of expo-polynomials `Σ_j p_j(t)·exp(λ_j t)`.
//!
//! Histories and method-of-steps segments both live in this class. It is
//! closed under addition, products, differentiation, argument shifts and
//! integration against `exp(-s t)`, so every quantity the solvers need from
//! a history can be computed in closed form.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Relative distance below which `s` and a term exponent are treated as equal
/// when integrating `p(v)·exp((λ - s)v)`.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// One term `poly(t)·exp(lambda·t)`; `poly` is ordered by ascending power.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub poly: Vec<Complex64>,
    pub lambda: Complex64,
}

impl ExpTerm {
    pub fn new(poly: Vec<Complex64>, lambda: Complex64) -> Self {
        Self { poly, lambda }
    }

    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    fn eval(&self, t: f64) -> Complex64 {
        poly_eval(&self.poly, Complex64::new(t, 0.0)) * (self.lambda * t).exp()
    }
}

/// Finite sum of polynomial-times-exponential terms with complex data.
///
/// Terms are kept sorted by exponent, terms with bit-identical exponents are
/// merged and zero polynomials are dropped, so structural equality is
/// meaningful.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self::polynomial(&[value])
    }

    /// Real polynomial with coefficients in ascending powers of `t`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let poly = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self::from_terms(vec![ExpTerm::new(poly, Complex64::new(0.0, 0.0))])
    }

    /// `scale·exp(lambda·t)`.
    pub fn exponential(scale: Complex64, lambda: Complex64) -> Self {
        Self::from_terms(vec![ExpTerm::new(vec![scale], lambda)])
    }

    /// `cos(omega·t)` as the conjugate pair `½e^{iωt} + ½e^{-iωt}`.
    pub fn cos(omega: f64) -> Self {
        if omega == 0.0 {
            return Self::constant(1.0);
        }
        let half = Complex64::new(0.5, 0.0);
        Self::from_terms(vec![
            ExpTerm::new(vec![half], Complex64::new(0.0, omega)),
            ExpTerm::new(vec![half], Complex64::new(0.0, -omega)),
        ])
    }

    /// `sin(omega·t)` as `-½i·e^{iωt} + ½i·e^{-iωt}`.
    pub fn sin(omega: f64) -> Self {
        if omega == 0.0 {
            return Self::zero();
        }
        Self::from_terms(vec![
            ExpTerm::new(vec![Complex64::new(0.0, -0.5)], Complex64::new(0.0, omega)),
            ExpTerm::new(vec![Complex64::new(0.0, 0.5)], Complex64::new(0.0, -omega)),
        ])
    }

    pub fn from_terms(terms: Vec<ExpTerm>) -> Self {
        let mut f = Self { terms };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        let mut terms = std::mem::take(&mut self.terms);
        terms.sort_by(|x, y| lambda_order(x.lambda, y.lambda));
        let mut merged: Vec<ExpTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.lambda == term.lambda => poly_add_assign(&mut last.poly, &term.poly),
                _ => merged.push(term),
            }
        }
        for term in &mut merged {
            trim(&mut term.poly);
        }
        merged.retain(|t| !t.poly.is_empty());
        self.terms = merged;
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total number of stored polynomial coefficients.
    pub fn monomial_count(&self) -> usize {
        self.terms.iter().map(|t| t.poly.len()).sum()
    }

    /// Complex value `Σ p_j(t) e^{λ_j t}`.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// Sum of term magnitudes at `t`; the scale against which rounding in
    /// [`ExpPoly::eval_complex`] should be judged.
    pub fn magnitude_bound(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t).norm()).sum()
    }

    /// Real part of the value at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let value = self.eval_complex(t);
        debug_assert!(
            value.im.abs() <= 1e-12 * (1.0 + self.magnitude_bound(t)),
            "expo-polynomial has imaginary part {} at t = {t}",
            value.im
        );
        value.re
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        if factor == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| ExpTerm::new(t.poly.iter().map(|c| c * factor).collect(), t.lambda))
                .collect(),
        )
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Term-wise `(p' + λp)·e^{λt}`.
    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut poly: Vec<Complex64> = t.poly.iter().map(|c| c * t.lambda).collect();
                    for (n, c) in t.poly.iter().enumerate().skip(1) {
                        poly[n - 1] += c * n as f64;
                    }
                    ExpTerm::new(poly, t.lambda)
                })
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// The function `t ↦ f(t + h)`.
    pub fn shift(&self, h: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let factor = (t.lambda * h).exp();
                    let poly = poly_taylor_shift(&t.poly, h).into_iter().map(|c| c * factor).collect();
                    ExpTerm::new(poly, t.lambda)
                })
                .collect(),
        )
    }

    /// `∫_lo^hi f(v)·e^{-sv} dv` in closed form.
    ///
    /// Each term is integrated by parts until its polynomial is exhausted. A
    /// term whose exponent coincides with `s` (within
    /// [`RESONANCE_TOLERANCE`]) is integrated as a plain polynomial.
    pub fn weighted_exp_integral(&self, s: Complex64, lo: f64, hi: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let mu = t.lambda - s;
                match exp_antiderivative(&t.poly, mu, s.norm()) {
                    Antiderivative::Resonant(q) => poly_eval(&q, hi.into()) - poly_eval(&q, lo.into()),
                    Antiderivative::Exponential(q) => {
                        poly_eval(&q, hi.into()) * (mu * hi).exp() - poly_eval(&q, lo.into()) * (mu * lo).exp()
                    }
                }
            })
            .sum()
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned().collect())
    }
}

impl Add for ExpPoly {
    type Output = ExpPoly;
    fn add(mut self, rhs: ExpPoly) -> ExpPoly {
        self.terms.extend(rhs.terms);
        self.normalize();
        self
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale_real(-1.0)
    }
}

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale_real(-1.0)
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        self + &(-rhs)
    }
}

impl Sub for ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: ExpPoly) -> ExpPoly {
        self + (-rhs)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for x in &self.terms {
            for y in &rhs.terms {
                terms.push(ExpTerm::new(poly_mul(&x.poly, &y.poly), x.lambda + y.lambda));
            }
        }
        ExpPoly::from_terms(terms)
    }
}

impl Mul for ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: ExpPoly) -> ExpPoly {
        &self * &rhs
    }
}

/// Antiderivative of `p(v)·e^{μv}` as `q(v)·e^{μv}` or, at resonance, as the
/// plain polynomial integral `q(v)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Antiderivative {
    Exponential(Vec<Complex64>),
    Resonant(Vec<Complex64>),
}

pub(crate) fn is_resonant(mu: Complex64, scale: f64) -> bool {
    mu.norm() < RESONANCE_TOLERANCE * scale.max(1.0)
}

pub(crate) fn exp_antiderivative(p: &[Complex64], mu: Complex64, scale: f64) -> Antiderivative {
    if is_resonant(mu, scale) {
        let mut q = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (n, c) in p.iter().enumerate() {
            q[n + 1] = c / (n + 1) as f64;
        }
        return Antiderivative::Resonant(q);
    }
    // q' + μq = p, solved from the top degree down.
    let mut q = vec![Complex64::new(0.0, 0.0); p.len()];
    let mut next = Complex64::new(0.0, 0.0);
    for n in (0..p.len()).rev() {
        let qn = (p[n] - next * (n + 1) as f64) / mu;
        q[n] = qn;
        next = qn;
    }
    Antiderivative::Exponential(q)
}

fn lambda_order(x: Complex64, y: Complex64) -> Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}

pub(crate) fn poly_eval(p: &[Complex64], t: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
}

fn poly_add_assign(acc: &mut Vec<Complex64>, other: &[Complex64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Complex64::new(0.0, 0.0));
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

pub(crate) fn poly_mul(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Coefficients of `p(t + h)`.
fn poly_taylor_shift(p: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut out = p.to_vec();
    // Repeated synthetic division (Horner shift).
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let upper = out[j + 1];
            out[j] += upper * h;
        }
    }
    out
}

fn trim(p: &mut Vec<Complex64>) {
    while p.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
        p.pop();
    }
}
