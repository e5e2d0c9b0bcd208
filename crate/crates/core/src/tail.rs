//! Closed form of the infinite asymptotic tail.
//!
//! With `s_k = σ₀ + iα_k`, `Σ_{k≥1} 2Re(c_k^a e^{s_k t}) = 2|b|^{t/τ}·P(t)`,
//! where `P` is periodic and built from the Fourier sums
//! `C_m(x) = Σ α_k^{-m} cos(α_k x)` (m even) and
//! `S_m(x) = Σ α_k^{-m} sin(α_k x)` (m odd).
//! On `[0, τ]` these are polynomials of degree `m`; outside they repeat with
//! period `τ` (`b > 0`) or flip sign every `τ` (`b < 0`).

use crate::error::{Error, Result};
use crate::problem::{NddeProblem, Parity};
use crate::residues::ResidueAsymptotics;

/// Highest order with a tabulated Bernoulli number.
pub const MAX_TAIL_ORDER: usize = 12;

/// `B_2, B_4, …, B_12`.
const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// `ζ(2n)` for `1 ≤ n ≤ 6`.
pub fn zeta_even(n: usize) -> f64 {
    let b = BERNOULLI_EVEN[n - 1];
    let two_pi = 2.0 * std::f64::consts::PI;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let factorial: f64 = (1..=2 * n).map(|i| i as f64).product();
    sign * b * two_pi.powi(2 * n as i32) / (2.0 * factorial)
}

/// `Σ_k α_k^{-2n}` over the ladder frequencies.
pub fn inverse_power_sum(tau: f64, parity: Parity, n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let e = 2 * n as i32;
    match parity {
        Parity::Full => zeta_even(n) * (tau / (2.0 * pi)).powi(e),
        Parity::Odd => (1.0 - 0.5f64.powi(e)) * zeta_even(n) * (tau / pi).powi(e),
    }
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_integral(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (n, c) in p.iter().enumerate() {
        out[n + 1] = c / (n + 1) as f64;
    }
    out
}

/// `C_m` / `S_m` on `[0, τ]` for `m = 2..=M`, as ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TailPolynomialSet {
    tau: f64,
    parity: Parity,
    polys: Vec<Vec<f64>>,
}

impl TailPolynomialSet {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn max_order(&self) -> usize {
        self.polys.len() - 1
    }

    /// Coefficients of the order-`m` polynomial; empty for `m < 2`.
    pub fn poly(&self, m: usize) -> &[f64] {
        &self.polys[m]
    }

    /// Order-`m` sum at `x ∈ [0, τ]`.
    pub fn eval(&self, m: usize, x: f64) -> f64 {
        poly_eval(&self.polys[m], x)
    }

    /// Order-`m` sum at any `t`, using the periodic extension.
    pub fn eval_periodic(&self, m: usize, t: f64) -> f64 {
        let (x, sign) = reduce(self.tau, self.parity, t);
        sign * self.eval(m, x)
    }
}

fn reduce(tau: f64, parity: Parity, t: f64) -> (f64, f64) {
    let n = (t / tau).floor();
    let x = (t - n * tau).clamp(0.0, tau);
    let sign = match parity {
        Parity::Odd if (n as i64).rem_euclid(2) == 1 => -1.0,
        _ => 1.0,
    };
    (x, sign)
}

/// Builds `C_2, S_3, C_4, …` up to order `max_order` by alternately
/// integrating: `S_{m+1} = ∫₀^x C_m` and `C_{m+1} = C_{m+1}(0) - ∫₀^x S_m`.
pub fn build_polynomials(tau: f64, parity: Parity, max_order: usize) -> Result<TailPolynomialSet> {
    if !(2..=MAX_TAIL_ORDER).contains(&max_order) {
        return Err(Error::InvalidArgument(format!(
            "tail order must lie in 2..={MAX_TAIL_ORDER}, got {max_order}"
        )));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("delay must be positive, got {tau}")));
    }
    let mut polys = vec![Vec::new(), Vec::new()];
    polys.push(match parity {
        Parity::Full => vec![tau * tau / 24.0, -tau / 4.0, 0.25],
        Parity::Odd => vec![tau * tau / 8.0, -tau / 4.0],
    });
    for m in 3..=max_order {
        let mut next = poly_integral(&polys[m - 1]);
        if m.is_multiple_of(2) {
            for c in next.iter_mut() {
                *c = -*c;
            }
            next[0] = inverse_power_sum(tau, parity, m / 2);
        }
        polys.push(next);
    }
    Ok(TailPolynomialSet { tau, parity, polys })
}

/// `Re(i^{-m}·z)` for real-coefficient pieces: the weight of `C_m` or `S_m`.
fn phase_sign(m: usize) -> f64 {
    match m % 4 {
        0 | 1 => 1.0,
        _ => -1.0,
    }
}

/// `P(x) = Σ_m a_m·[cos(mπ/2)C_m(x) + sin(mπ/2)S_m(x)]` on `[0, τ]`, with its
/// periodic extension.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPiecewise {
    tau: f64,
    parity: Parity,
    poly: Vec<f64>,
}

impl PeriodicPiecewise {
    pub fn from_asymptotics(set: &TailPolynomialSet, asymptotics: &ResidueAsymptotics) -> Result<Self> {
        let order = asymptotics.order();
        if order > set.max_order() {
            return Err(Error::InvalidArgument(format!(
                "tail polynomials built to order {} but the expansion has order {order}",
                set.max_order()
            )));
        }
        let mut poly = vec![0.0; order + 1];
        for m in 2..=order {
            let weight = phase_sign(m) * asymptotics.coefficient(m);
            for (acc, c) in poly.iter_mut().zip(set.poly(m)) {
                *acc += weight * c;
            }
        }
        Ok(Self {
            tau: set.tau,
            parity: set.parity,
            poly,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.poly
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (x, sign) = reduce(self.tau, self.parity, t);
        sign * poly_eval(&self.poly, x)
    }
}

/// `2|b|^{t/τ}·P(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailComponent {
    growth_rate: f64,
    periodic: PeriodicPiecewise,
}

impl TailComponent {
    pub fn periodic(&self) -> &PeriodicPiecewise {
        &self.periodic
    }

    pub fn eval(&self, t: f64) -> f64 {
        2.0 * (self.growth_rate * t).exp() * self.periodic.eval(t)
    }
}

pub fn tail_component(p: &NddeProblem, asymptotics: &ResidueAsymptotics) -> Result<TailComponent> {
    let set = build_polynomials(p.tau(), p.parity(), asymptotics.order().max(2))?;
    Ok(TailComponent {
        growth_rate: p.growth_rate(),
        periodic: PeriodicPiecewise::from_asymptotics(&set, asymptotics)?,
    })
}
