//! Residues of the transformed solution `Y(s) = N(s)/D(s)` and their
//! large-`k` expansions.
//!
//! `N(s) = H(0) - bH(-τ) + (bs + c)e^{-sτ}∫_{-τ}^0 H(v)e^{-sv}dv`, so the
//! residue at a simple root `r` is `N(r)/D'(r)`.
//!
//! For the expansions, the history integral is expanded by parts in `1/s`,
//! `e^{-sτ}` is replaced by an algebraic surrogate, and the resulting ratio
//! is re-expanded about the pole abscissa `ln|b|/τ`:
//! * original: `e^{-sτ} → 1/b`, the leading-order pole condition;
//! * modified: `e^{-sτ} → (s - a)/(bs + c)`, which holds exactly at every root.

use num_complex::Complex64;

use crate::charroots::{characteristic_derivative, Pole, PoleFamily};
use crate::error::{Error, Result};
use crate::laurent::{recentre, TruncatedSeries, Variable};
use crate::problem::NddeProblem;

/// Largest supported expansion order.
pub const MAX_EXPANSION_ORDER: usize = 16;

pub fn numerator_value(p: &NddeProblem, s: Complex64) -> Complex64 {
    let h = p.history();
    let tau = p.tau();
    let integral = h.weighted_exp_integral(s, -tau, 0.0);
    h.eval_complex(0.0) - h.eval_complex(-tau) * p.b() + (s * p.b() + p.c()) * (-s * tau).exp() * integral
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residue {
    pub pole: Complex64,
    pub value: Complex64,
}

/// `N(r)/D'(r)`; fails when `D'(r)` vanishes to working precision.
pub fn residue_at(p: &NddeProblem, pole: &Pole) -> Result<Residue> {
    let r = pole.value;
    if pole.multiplicity > 1 {
        return Err(Error::MultiplePole(r));
    }
    let slope = characteristic_derivative(p, r);
    if slope.norm() <= 1e-10 * r.norm().max(1.0) {
        return Err(Error::MultiplePole(r));
    }
    Ok(Residue {
        pole: r,
        value: numerator_value(p, r) / slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    Original,
    Modified,
}

impl ExpansionMode {
    pub fn name(self) -> &'static str {
        match self {
            ExpansionMode::Original => "original",
            ExpansionMode::Modified => "modified",
        }
    }
}

/// `c_k^a = Σ_{m=2}^{M} a_m (iα_k)^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueAsymptotics {
    pub mode: ExpansionMode,
    /// `a_2, …, a_M`.
    pub coefficients: Vec<f64>,
    /// The same expansion in powers of `1/s`, `b_2, …, b_M`.
    pub inverse_s: Vec<f64>,
}

impl ResidueAsymptotics {
    pub fn order(&self) -> usize {
        self.coefficients.len() + 1
    }

    /// `a_m`, zero outside `2..=M`.
    pub fn coefficient(&self, m: usize) -> f64 {
        if m < 2 {
            return 0.0;
        }
        self.coefficients.get(m - 2).copied().unwrap_or(0.0)
    }

    /// `Σ a_m (iα)^{-m}`.
    pub fn evaluate(&self, alpha: f64) -> Complex64 {
        let w = Complex64::new(0.0, -1.0 / alpha);
        let mut power = w * w;
        let mut sum = Complex64::new(0.0, 0.0);
        for a in &self.coefficients {
            sum += power * a;
            power *= w;
        }
        sum
    }

    /// `Σ b_m s^{-m}`, the unre-centred expansion at an arbitrary point.
    pub fn evaluate_inverse_s(&self, s: Complex64) -> Complex64 {
        let w = s.inv();
        let mut power = w * w;
        let mut sum = Complex64::new(0.0, 0.0);
        for b in &self.inverse_s {
            sum += power * b;
            power *= w;
        }
        sum
    }
}

fn constant(value: f64, precision: i32) -> TruncatedSeries {
    TruncatedSeries::from_real(Variable::InverseS, 0, &[value], precision)
}

/// `κ·s + μ` as a series in `1/s`.
fn linear(kappa: f64, mu: f64, precision: i32) -> TruncatedSeries {
    TruncatedSeries::from_real(Variable::InverseS, -1, &[kappa, mu], precision)
}

fn build_expansion(p: &NddeProblem, order: usize, mode: ExpansionMode) -> Result<ResidueAsymptotics> {
    if !(2..=MAX_EXPANSION_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "expansion order must lie in 2..={MAX_EXPANSION_ORDER}, got {order}"
        )));
    }
    let (a, b, c, tau) = (p.a(), p.b(), p.c(), p.tau());
    let h = p.history();
    let m = order as i32;
    let work = m + 4;

    // Surrogate for e^{-sτ} and its reciprocal.
    let (decay, growth) = match mode {
        ExpansionMode::Original => (constant(1.0 / b, work), constant(b, work)),
        ExpansionMode::Modified => {
            let num = linear(1.0, -a, work);
            let den = linear(b, c, work);
            (num.try_div(&den)?, den.try_div(&num)?)
        }
    };

    // ∫_{-τ}^0 H(v)e^{-sv}dv ~ Σ_j [H^{(j)}(-τ)e^{sτ} - H^{(j)}(0)] / s^{j+1}.
    let mut at_start = Vec::with_capacity(work as usize);
    let mut at_end = Vec::with_capacity(work as usize);
    let mut derivative = h.clone();
    for _ in 0..work {
        at_start.push(derivative.eval(-tau));
        at_end.push(derivative.eval(0.0));
        derivative = derivative.derivative();
    }
    let start = TruncatedSeries::from_real(Variable::InverseS, 1, &at_start, work + 1);
    let end = TruncatedSeries::from_real(Variable::InverseS, 1, &at_end, work + 1);
    let integral = growth.try_mul(&start)?.try_sub(&end)?;

    let numerator = constant(h.eval(0.0) - b * h.eval(-tau), work)
        .try_add(&linear(b, c, work).try_mul(&decay)?.try_mul(&integral)?)?;
    // The constant term cancels identically; drop its rounding residue.
    let (numerator, _) = numerator.discard_below(1);
    let slope = constant(1.0, work).try_add(&linear(b * tau, c * tau - b, work).try_mul(&decay)?)?;
    let (slope, _) = slope.discard_below(-1);

    let ratio = numerator.try_div(&slope)?.truncate(m + 1);
    let (ratio, _) = ratio.discard_below(2);
    let centred = recentre(&ratio, p.growth_rate(), m)?;

    let real_part = |series: &TruncatedSeries| -> Result<Vec<f64>> {
        (2..=m)
            .map(|power| {
                let value = series
                    .coefficient(power)
                    .ok_or_else(|| Error::InvalidArgument(format!("expansion lost precision before order {power}")))?;
                debug_assert!(value.im.abs() <= 1e-9 * (1.0 + value.re.abs()));
                Ok(value.re)
            })
            .collect()
    };
    Ok(ResidueAsymptotics {
        mode,
        coefficients: real_part(&centred)?,
        inverse_s: real_part(&ratio)?,
    })
}

/// Expansion built from `e^{-sτ} → (s - a)/(bs + c)`.
pub fn modified_expansion(p: &NddeProblem, order: usize) -> Result<ResidueAsymptotics> {
    build_expansion(p, order, ExpansionMode::Modified)
}

/// Expansion built from `e^{-sτ} → 1/b`.
pub fn original_expansion(p: &NddeProblem, order: usize) -> Result<ResidueAsymptotics> {
    build_expansion(p, order, ExpansionMode::Original)
}

pub fn expansion(p: &NddeProblem, order: usize, mode: ExpansionMode) -> Result<ResidueAsymptotics> {
    build_expansion(p, order, mode)
}

/// `c_k^a` at the ladder frequency `α_k`.
pub fn asymptotic_residue(p: &NddeProblem, k: usize, asymptotics: &ResidueAsymptotics) -> Complex64 {
    asymptotics.evaluate(p.frequency(k))
}

/// Components below this magnitude are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueErrorRow {
    pub k: usize,
    pub mode: ExpansionMode,
    pub exact: Complex64,
    pub approximate: Complex64,
    pub re_error: f64,
    pub im_error: f64,
    /// `abs-re` / `abs-im` when that component fell back to absolute error.
    pub flags: Vec<&'static str>,
}

fn component_error(exact: f64, approx: f64) -> (f64, bool) {
    if exact.abs() < RELATIVE_FLOOR {
        ((approx - exact).abs(), true)
    } else {
        ((approx - exact).abs() / exact.abs(), false)
    }
}

/// Componentwise error of `c_k^a` against the exact ladder residues, for
/// `k ≥ k_min`.
pub fn residue_error_report(
    p: &NddeProblem,
    family: &PoleFamily,
    asymptotics: &ResidueAsymptotics,
    k_min: usize,
) -> Result<Vec<ResidueErrorRow>> {
    family
        .complex_poles
        .iter()
        .filter(|pole| pole.index >= k_min)
        .map(|pole| {
            let exact = residue_at(p, pole)?.value;
            let approximate = asymptotic_residue(p, pole.index, asymptotics);
            let (re_error, re_abs) = component_error(exact.re, approximate.re);
            let (im_error, im_abs) = component_error(exact.im, approximate.im);
            let mut flags = Vec::new();
            if re_abs {
                flags.push("abs-re");
            }
            if im_abs {
                flags.push("abs-im");
            }
            Ok(ResidueErrorRow {
                k: pole.index,
                mode: asymptotics.mode,
                exact,
                approximate,
                re_error,
                im_error,
                flags,
            })
        })
        .collect()
}
