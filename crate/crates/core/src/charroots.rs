//! Roots of the characteristic function `D(s) = s - a - (bs + c)e^{-sτ}`.
//!
//! The roots split into
//! * up to two real roots, found by a sign-change scan,
//! * for `b > 0` without real roots, one complex pair in the base band
//!   `|Im s| < π/τ`,
//! * the ladder `r_k`, `k ≥ 1`, one root per frequency band, approaching the
//!   vertical line `Re s = ln|b|/τ`. Each is refined by damped Newton from
//!   an asymptotic seed.
//!
//! Only the upper member of each conjugate pair is stored.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{NddeProblem, Parity};

const NEWTON_MAX_ITERATIONS: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 8;
const BRACKET_MAX_ITERATIONS: usize = 200;

/// Acceptance threshold for `|D(s)|` at a refined root.
pub fn residual_tolerance(s: Complex64) -> f64 {
    1e-12 * s.norm().max(1.0)
}

pub fn characteristic_value(p: &NddeProblem, s: Complex64) -> Complex64 {
    s - p.a() - (s * p.b() + p.c()) * (-s * p.tau()).exp()
}

pub fn characteristic_derivative(p: &NddeProblem, s: Complex64) -> Complex64 {
    let (b, c, tau) = (p.b(), p.c(), p.tau());
    1.0 + (s * (b * tau) - b + c * tau) * (-s * tau).exp()
}

pub fn characteristic_second_derivative(p: &NddeProblem, s: Complex64) -> Complex64 {
    let (b, c, tau) = (p.b(), p.c(), p.tau());
    (-s * tau).exp() * tau * (2.0 * b - s * (b * tau) - c * tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub value: Complex64,
    /// Ordinal for real roots (ascending), band index for complex roots.
    pub index: usize,
    pub kind: PoleKind,
    /// `|D(value)|` after refinement.
    pub residual: f64,
    /// 2 for a tangential real root; 1 otherwise.
    pub multiplicity: u32,
}

/// Second-order corrections of the asymptotic pole formula,
/// `s_k + β/k² + iγ/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovedPoleCorrection {
    pub beta: f64,
    pub gamma: f64,
}

impl ImprovedPoleCorrection {
    /// Matches `e^{-sτ}` against `(s - a)/(bs + c)` through order `k⁻²`.
    ///
    /// For `b < 0` the same expressions hold with `ln|b|`; the odd-harmonic
    /// ladder leaves an extra `i·γ/(2k²)` term that this two-parameter form
    /// cannot absorb, so the corrected seed is still `O(k⁻²)` accurate.
    pub fn for_problem(p: &NddeProblem) -> Self {
        let (a, b, c, tau) = (p.a(), p.b(), p.c(), p.tau());
        let mismatch = p.mismatch();
        let beta = mismatch * (2.0 * b * b.abs().ln() - tau * (a * b - c)) / (8.0 * b * b * PI * PI);
        let gamma = -mismatch / (2.0 * b * PI);
        Self { beta, gamma }
    }
}

/// Band containing imaginary part `im`. Band `k` is centred on the ladder
/// frequency `α_k` and one frequency spacing wide.
pub fn band_index(p: &NddeProblem, im: f64) -> i64 {
    let x = im * p.tau() / (2.0 * PI);
    match p.parity() {
        Parity::Full => x.round() as i64,
        Parity::Odd => x.floor() as i64 + 1,
    }
}

/// `(ln|b| + iα_k)/τ`.
pub fn asymptotic_pole(p: &NddeProblem, k: usize) -> Complex64 {
    Complex64::new(p.growth_rate(), p.frequency(k))
}

pub fn improved_asymptotic_pole(p: &NddeProblem, k: usize) -> Complex64 {
    let corr = ImprovedPoleCorrection::for_problem(p);
    let kf = k as f64;
    asymptotic_pole(p, k) + Complex64::new(corr.beta / (kf * kf), corr.gamma / kf)
}

fn newton(p: &NddeProblem, seed: Complex64) -> Result<(Complex64, f64)> {
    let mut s = seed;
    let mut f = characteristic_value(p, s);
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonConvergence {
            last: s,
            residual: f64::NAN,
        });
    }
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let residual = f.norm();
        if residual <= residual_tolerance(s) {
            // One polishing step, kept only if it helps.
            let polished = s - f / characteristic_derivative(p, s);
            let fp = characteristic_value(p, polished);
            if fp.norm() < residual {
                return Ok((polished, fp.norm()));
            }
            return Ok((s, residual));
        }
        let slope = characteristic_derivative(p, s);
        let step = f / slope;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let mut damping = 1.0;
        let mut next = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let candidate = s - step * damping;
            let fc = characteristic_value(p, candidate);
            if fc.norm() < residual {
                next = Some((candidate, fc));
                break;
            }
            damping *= 0.5;
        }
        let (candidate, fc) = next.unwrap_or_else(|| {
            let candidate = s - step;
            (candidate, characteristic_value(p, candidate))
        });
        s = candidate;
        f = fc;
        if !(f.re.is_finite() && f.im.is_finite()) {
            break;
        }
    }
    Err(Error::NonConvergence {
        last: s,
        residual: f.norm(),
    })
}

/// Damped Newton refinement of a root from `seed`; the result must stay in
/// the seed's frequency band.
pub fn refine_pole(p: &NddeProblem, seed: Complex64) -> Result<Pole> {
    let (mut value, residual) = newton(p, seed)?;
    if value.im.abs() <= 1e-14 * value.norm().max(1.0) {
        value.im = 0.0;
    }
    let expected = band_index(p, seed.im);
    let found = band_index(p, value.im);
    if expected != found {
        return Err(Error::BandEscape { expected, found, value });
    }
    let kind = if value.im == 0.0 {
        PoleKind::Real
    } else {
        PoleKind::Complex
    };
    Ok(Pole {
        value,
        index: found.max(0) as usize,
        kind,
        residual,
        multiplicity: 1,
    })
}

/// Ladder root `r_k`, seeded from the improved asymptotic formula with the
/// plain formula as fallback.
pub fn refine_ladder_pole(p: &NddeProblem, k: usize) -> Result<Pole> {
    let improved = refine_pole(p, improved_asymptotic_pole(p, k));
    let pole = match improved {
        Ok(pole) => Ok(pole),
        Err(_) => refine_pole(p, asymptotic_pole(p, k)),
    };
    match pole {
        Ok(pole) if pole.kind == PoleKind::Complex && pole.value.im > 0.0 => Ok(Pole { index: k, ..pole }),
        Ok(pole) => Err(Error::Ladder {
            k,
            source: Box::new(Error::BandEscape {
                expected: k as i64,
                found: band_index(p, pole.value.im),
                value: pole.value,
            }),
        }),
        Err(source) => Err(Error::Ladder {
            k,
            source: Box::new(source),
        }),
    }
}

/// Outcome of the real-axis scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRootScan {
    pub roots: Vec<Pole>,
    pub window: (f64, f64),
    pub warnings: Vec<String>,
}

impl RealRootScan {
    /// Real roots counted with multiplicity.
    pub fn count(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Half-width of the real scan window, `10·(1 + |a| + |c| + |ln|b||/τ)`.
pub fn real_scan_radius(p: &NddeProblem) -> f64 {
    10.0 * (1.0 + p.a().abs() + p.c().abs() + p.growth_rate().abs())
}

fn d_real(p: &NddeProblem, x: f64) -> f64 {
    x - p.a() - (p.b() * x + p.c()) * (-x * p.tau()).exp()
}

fn dp_real(p: &NddeProblem, x: f64) -> f64 {
    let (b, c, tau) = (p.b(), p.c(), p.tau());
    1.0 + (b * x * tau - b + c * tau) * (-x * tau).exp()
}

fn dpp_real(p: &NddeProblem, x: f64) -> f64 {
    let (b, c, tau) = (p.b(), p.c(), p.tau());
    (-x * tau).exp() * tau * (2.0 * b - b * x * tau - c * tau)
}

fn real_tolerance(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// Safeguarded Newton inside a sign-change bracket.
fn bracketed_root(p: &NddeProblem, mut lo: f64, mut hi: f64) -> (f64, f64, bool) {
    let mut f_lo = d_real(p, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..BRACKET_MAX_ITERATIONS {
        let fx = d_real(p, x);
        if fx.abs() <= real_tolerance(x) {
            return (x, fx.abs(), true);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let slope = dp_real(p, x);
        let newton = x - fx / slope;
        x = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            let fx = d_real(p, x);
            return (x, fx.abs(), fx.abs() <= real_tolerance(x));
        }
    }
    let fx = d_real(p, x);
    (x, fx.abs(), fx.abs() <= real_tolerance(x))
}

/// Tangential root near a local minimum of `|D|`: Newton on `D'` locates the
/// extremum, which is a double root if `D` vanishes there.
fn tangential_root(p: &NddeProblem, lo: f64, hi: f64, start: f64) -> Option<(f64, f64)> {
    let mut x = start;
    for _ in 0..50 {
        let step = dp_real(p, x) / dpp_real(p, x);
        if !step.is_finite() {
            return None;
        }
        x -= step;
        if x < lo || x > hi {
            return None;
        }
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    let value = d_real(p, x).abs();
    (value <= 1e-10 * x.abs().max(1.0)).then_some((x, value))
}

pub fn find_real_roots(p: &NddeProblem) -> RealRootScan {
    let radius = real_scan_radius(p);
    let step = p.tau() / 50.0;
    let count = (2.0 * radius / step).ceil() as usize;
    let xs: Vec<f64> = (0..=count).map(|i| -radius + i as f64 * step).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| d_real(p, x)).collect();

    let mut found: Vec<(f64, f64, u32)> = Vec::new();
    let mut warnings = Vec::new();
    for i in 0..xs.len() {
        if !fs[i].is_finite() {
            continue;
        }
        if fs[i] == 0.0 {
            let multiplicity = if dp_real(p, xs[i]).abs() <= 1e-10 { 2 } else { 1 };
            found.push((xs[i], 0.0, multiplicity));
            continue;
        }
        if i + 1 < xs.len() && fs[i + 1].is_finite() && fs[i + 1] != 0.0 && fs[i].signum() != fs[i + 1].signum() {
            let (x, residual, converged) = bracketed_root(p, xs[i], xs[i + 1]);
            if !converged {
                warnings.push(format!(
                    "real root bracket [{}, {}] did not converge in {BRACKET_MAX_ITERATIONS} steps (residual {residual:e})",
                    xs[i],
                    xs[i + 1]
                ));
            }
            found.push((x, residual, 1));
        }
        if i >= 1 && i + 1 < xs.len() {
            let (l, m, r) = (fs[i - 1], fs[i], fs[i + 1]);
            let same_sign = l.is_finite() && r.is_finite() && l.signum() == m.signum() && m.signum() == r.signum();
            if same_sign && m.abs() <= l.abs() && m.abs() <= r.abs() {
                if let Some((x, residual)) = tangential_root(p, xs[i - 1], xs[i + 1], xs[i]) {
                    if !found.iter().any(|(y, _, _)| (y - x).abs() < step) {
                        warnings.push(format!("tangential (double) real root near {x}"));
                        found.push((x, residual, 2));
                    }
                }
            }
        }
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    if found.len() > 2 {
        warnings.push(format!("{} real roots found; expected at most 2", found.len()));
    }
    let roots = found
        .into_iter()
        .enumerate()
        .map(|(index, (x, residual, multiplicity))| Pole {
            value: Complex64::new(x, 0.0),
            index,
            kind: PoleKind::Real,
            residual,
            multiplicity,
        })
        .collect();
    RealRootScan {
        roots,
        window: (-radius, radius),
        warnings,
    }
}

/// Complex root with `0 < Im s < π/τ` (b > 0, no real roots).
fn find_base_pair(p: &NddeProblem, radius: f64) -> Result<Pole> {
    let half_spacing = PI / p.tau();
    let mut roots: Vec<Pole> = Vec::new();
    for i in 0..=40 {
        let re = -radius + 2.0 * radius * i as f64 / 40.0;
        for j in 1..=4 {
            let seed = Complex64::new(re, 0.2 * j as f64 * half_spacing);
            let Ok((value, residual)) = newton(p, seed) else {
                continue;
            };
            let floor = 1e-9 * value.norm().max(1.0);
            if value.im > floor
                && value.im < half_spacing
                && !roots
                    .iter()
                    .any(|r| (r.value - value).norm() < 1e-8 * value.norm().max(1.0))
            {
                roots.push(Pole {
                    value,
                    index: 0,
                    kind: PoleKind::Complex,
                    residual,
                    multiplicity: 1,
                });
            }
        }
    }
    match roots.len() {
        1 => Ok(roots.remove(0)),
        0 => Err(Error::BaseBand(
            "no real roots and no complex root with 0 < Im s < π/τ".into(),
        )),
        n => Err(Error::BaseBand(format!(
            "{n} distinct complex roots with 0 < Im s < π/τ; expected one"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleFamily {
    pub real_poles: Vec<Pole>,
    /// Upper member of a complex pair below the first ladder band (only for
    /// `b > 0` when there are no real roots).
    pub base_poles: Vec<Pole>,
    /// Ladder poles `k = 1..=N`, ascending imaginary part.
    pub complex_poles: Vec<Pole>,
    pub seeds: Vec<Complex64>,
    pub improved_seeds: Vec<Complex64>,
    pub frequencies: Vec<f64>,
    pub growth_rate: f64,
    pub correction: ImprovedPoleCorrection,
    pub scan_window: (f64, f64),
    pub diagnostics: Vec<String>,
}

impl PoleFamily {
    pub fn has_multiple_root(&self) -> bool {
        self.real_poles.iter().any(|r| r.multiplicity > 1)
    }
}

pub fn build_pole_family(p: &NddeProblem, n: usize) -> Result<PoleFamily> {
    if n == 0 {
        return Err(Error::InvalidArgument("the pole ladder needs N >= 1".into()));
    }
    let scan = find_real_roots(p);
    let mut diagnostics = scan.warnings.clone();
    if p.b().abs() == 1.0 {
        diagnostics.push("|b| = 1: ladder poles approach the imaginary axis and the tail does not decay".into());
    }
    let real_count = scan.count();
    let mut base_poles = Vec::new();
    match p.parity() {
        Parity::Full if real_count == 0 => base_poles.push(find_base_pair(p, scan.window.1)?),
        Parity::Full if real_count == 1 => diagnostics
            .push("b > 0 with a single simple real root: a second real root may lie outside the scan window".into()),
        Parity::Odd if real_count.is_multiple_of(2) => {
            diagnostics.push(format!("b < 0 with {real_count} real roots: expected an odd count"))
        }
        _ => {}
    }

    let complex_poles = (1..=n)
        .into_par_iter()
        .map(|k| refine_ladder_pole(p, k))
        .collect::<Result<Vec<_>>>()?;
    for pair in complex_poles.windows(2) {
        if pair[1].value.im <= pair[0].value.im {
            return Err(Error::Ladder {
                k: pair[1].index,
                source: Box::new(Error::BandEscape {
                    expected: pair[1].index as i64,
                    found: band_index(p, pair[1].value.im),
                    value: pair[1].value,
                }),
            });
        }
    }

    Ok(PoleFamily {
        real_poles: scan.roots,
        base_poles,
        complex_poles,
        seeds: (1..=n).map(|k| asymptotic_pole(p, k)).collect(),
        improved_seeds: (1..=n).map(|k| improved_asymptotic_pole(p, k)).collect(),
        frequencies: (1..=n).map(|k| p.frequency(k)).collect(),
        growth_rate: p.growth_rate(),
        correction: ImprovedPoleCorrection::for_problem(p),
        scan_window: scan.window,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expo_poly::ExpPoly;
    use approx::assert_relative_eq;

    fn problem(a: f64, b: f64, c: f64, tau: f64) -> NddeProblem {
        NddeProblem::new(a, b, c, tau, ExpPoly::constant(1.0)).unwrap()
    }

    fn example1() -> NddeProblem {
        problem(-2.1, 0.9, 2.12, 1.0)
    }

    fn example2() -> NddeProblem {
        problem(-2.1, 7.0 / 11.0, -2.0, 2.0)
    }

    fn example3() -> NddeProblem {
        problem(14.0 / 33.0, -8.0 / 9.0, -1.0 / 3.0, 1.0)
    }

    #[test]
    fn characteristic_value_basics() {
        let p = problem(0.0, 1.0, 0.0, 1.0);
        assert!(characteristic_value(&p, Complex64::new(0.0, 2.0 * PI)).norm() < 1e-14);
        let q = example1();
        let d0 = characteristic_value(&q, Complex64::new(0.0, 0.0));
        assert_relative_eq!(d0.re, 2.1 - 2.12, epsilon = 1e-15);
        assert!(characteristic_value(&q, Complex64::new(0.009, 0.0)).norm() < 1e-2);
    }

    #[test]
    fn characteristic_derivative_values() {
        let p = problem(0.0, 1.0, 0.0, 1.0);
        assert_eq!(characteristic_derivative(&p, Complex64::new(0.0, 0.0)).norm(), 0.0);
        let d = characteristic_derivative(&example1(), Complex64::new(0.0, 0.0));
        assert_relative_eq!(d.re, 2.22, epsilon = 1e-14);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = example2();
        let s = Complex64::new(1.0, 3.0);
        let h = 1e-6;
        let fd = (characteristic_value(&p, s + h) - characteristic_value(&p, s - h)) / (2.0 * h);
        let exact = characteristic_derivative(&p, s);
        assert!((fd - exact).norm() / exact.norm() < 1e-8);
        let fd2 = (characteristic_derivative(&p, s + h) - characteristic_derivative(&p, s - h)) / (2.0 * h);
        let exact2 = characteristic_second_derivative(&p, s);
        assert!((fd2 - exact2).norm() / exact2.norm() < 1e-8);
    }

    #[test]
    fn asymptotic_poles() {
        let p = problem(0.0, std::f64::consts::E, 0.0, 1.0);
        let s = asymptotic_pole(&p, 1);
        assert_relative_eq!(s.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.im, 2.0 * PI, epsilon = 1e-15);
        let s = asymptotic_pole(&example1(), 1);
        assert_relative_eq!(s.re, -0.105361, epsilon = 1e-6);
        assert_relative_eq!(s.im, 2.0 * PI, epsilon = 1e-12);
        let s = asymptotic_pole(&example3(), 1);
        assert_relative_eq!(s.re, -0.117783, epsilon = 1e-6);
        assert_relative_eq!(s.im, PI, epsilon = 1e-12);
    }

    #[test]
    fn improved_correction_values() {
        let corr = ImprovedPoleCorrection::for_problem(&example1());
        assert_relative_eq!(corr.gamma, -0.23 / (2.0 * 0.9 * PI), epsilon = 1e-12);
        assert_relative_eq!(corr.gamma, -0.0406729, epsilon = 1e-7);
        let exact = problem(-1.0, 0.5, 0.5, 1.0);
        for k in 1..5 {
            assert_eq!(improved_asymptotic_pole(&exact, k), asymptotic_pole(&exact, k));
        }
    }

    #[test]
    fn improved_seed_is_closer() {
        let p = example1();
        let r = refine_ladder_pole(&p, 5).unwrap().value;
        assert!((r - improved_asymptotic_pole(&p, 5)).norm() < (r - asymptotic_pole(&p, 5)).norm());
    }

    #[test]
    fn exact_poles_when_mismatch_vanishes() {
        let p = problem(-1.0, 0.5, 0.5, 1.0);
        for k in 1..=8 {
            let seed = asymptotic_pole(&p, k);
            let pole = refine_pole(&p, seed).unwrap();
            assert!((pole.value - seed).norm() <= 1e-14, "k={k}");
        }
    }

    #[test]
    fn real_roots_of_examples() {
        let scan = find_real_roots(&example1());
        assert_eq!(scan.roots.len(), 2);
        assert!(scan.roots[0].value.re < 0.0);
        assert_relative_eq!(scan.roots[1].value.re, 0.009, epsilon = 5e-4);
        assert!(scan.roots.iter().all(|r| r.residual <= 1e-12));
        assert!(find_real_roots(&example2()).roots.is_empty());
        let scan = find_real_roots(&example3());
        assert_eq!(scan.roots.len(), 1);
        assert!(scan.roots[0].value.re > 0.0);
    }

    #[test]
    fn tangential_root_is_flagged() {
        // D(s) = s - a - (bs + c)e^{-s}: choose c so that D has a double root at 0.
        // D(0) = -a - c = 0 and D'(0) = 1 - b + c = 0 with b = 0.5 → c = -0.5, a = 0.5.
        let p = problem(0.5, 0.5, -0.5, 1.0);
        let scan = find_real_roots(&p);
        assert!(
            scan.roots
                .iter()
                .any(|r| r.multiplicity == 2 && r.value.re.abs() < 1e-6),
            "{scan:?}"
        );
    }

    #[test]
    fn refined_ladder_poles() {
        let pole = refine_ladder_pole(&example1(), 1).unwrap();
        assert!(pole.residual <= 1e-12);
        let pole = refine_ladder_pole(&example2(), 3).unwrap();
        assert!(pole.value.im > 0.0);
        assert_eq!(band_index(&example2(), pole.value.im), 3);
    }

    #[test]
    fn band_escape_is_reported() {
        // Started near the band edge, Newton settles on the band-1 pole.
        let err = refine_pole(&example1(), Complex64::new(-1.0, 15.5)).unwrap_err();
        assert!(
            matches!(
                err,
                Error::BandEscape {
                    expected: 2,
                    found: 1,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn pole_families() {
        let fam = build_pole_family(&example1(), 12).unwrap();
        assert_eq!(fam.real_poles.len(), 2);
        assert_eq!(fam.complex_poles.len(), 12);
        assert!(fam.base_poles.is_empty());
        assert!(fam
            .real_poles
            .iter()
            .chain(&fam.complex_poles)
            .all(|r| r.residual <= residual_tolerance(r.value)));

        let fam = build_pole_family(&example2(), 12).unwrap();
        assert!(fam.real_poles.is_empty());
        assert_eq!(fam.complex_poles.len(), 12);
        assert_eq!(fam.base_poles.len(), 1);
        assert!(fam.base_poles[0].value.im < PI / 2.0);

        let fam = build_pole_family(&example3(), 1).unwrap();
        assert_eq!(fam.complex_poles.len(), 1);
        assert!(build_pole_family(&example3(), 0).is_err());
    }
}
