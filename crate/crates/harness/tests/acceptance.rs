//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run alone with `cargo test -p ndde-harness --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ndde_core::charroots::{asymptotic_pole, build_pole_family, improved_asymptotic_pole, refine_ladder_pole};
use ndde_core::residues::{asymptotic_residue, expansion, residue_at, ExpansionMode};
use ndde_core::solvers::{method_of_steps, solve_modified_lf, solve_original_lf, solve_series};
use ndde_core::tail::build_polynomials;
use ndde_core::{ExpPoly, Method, MosSolution, NddeProblem, Parity, SolverConfig};
use ndde_harness::report::loglog_slope;
use ndde_harness::ProblemConfig;
use ndde_oracles::{harmonic_partial_sum, SpectralMos};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T_MAX: f64 = 10.0;
const GRID_STEP: f64 = 1e-3;
const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn example(i: usize) -> NddeProblem {
    ProblemConfig::example(i).unwrap().problem().unwrap()
}

/// Expansion order used for each example's accelerated solutions.
fn order_for(i: usize) -> usize {
    if i == 3 {
        7
    } else {
        8
    }
}

struct Reference {
    grid: Vec<f64>,
    values: Vec<f64>,
    mos: MosSolution,
}

fn reference(p: &NddeProblem) -> Reference {
    let mos = method_of_steps(p, T_MAX).unwrap();
    let grid: Vec<f64> = (0..=(T_MAX / GRID_STEP).round() as usize)
        .map(|i| i as f64 * GRID_STEP)
        .collect();
    let values = grid.iter().map(|&t| mos.evaluate(t).unwrap()).collect();
    Reference { grid, values, mos }
}

fn max_error(p: &NddeProblem, method: Method, n: usize, m: usize, r: &Reference) -> f64 {
    let sol = solve_series(p, &SolverConfig::new(method, n, m)).unwrap();
    r.grid
        .iter()
        .zip(&r.values)
        .map(|(&t, &y)| (sol.evaluate(t) - y).abs())
        .fold(0.0, f64::max)
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn verdict(ok: bool, details: String) -> Outcome {
    if ok {
        Ok(details)
    } else {
        Err(details)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = example(3);
    let r = reference(&p);
    let table = [
        (Method::PureLaplace, [(50, 0.02), (250, 0.004), (500, 0.002)]),
        (Method::ModifiedLf, [(50, 1.2e-5), (250, 9.6e-8), (500, 1.2e-8)]),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (method, rows) in table {
        for (n, target) in rows {
            let err = max_error(&p, method, n, order_for(3), &r);
            let ratio = err / target;
            let pass = (0.5..=2.0).contains(&ratio);
            ok &= pass;
            lines.push(format!(
                "{method} N={n}: {err:.3e} vs {target:.1e} (ratio {ratio:.2}) {}",
                if pass { "ok" } else { "out of band" }
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 120.0;
    lines.push(format!("runtime {elapsed:.1}s"));
    verdict(ok, lines.join("; "))
}

fn criterion_2() -> Outcome {
    let ns = [50usize, 100, 200, 400];
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mut ok = true;
    let mut lines = Vec::new();
    for i in 1..=3 {
        let p = example(i);
        let r = reference(&p);
        for (method, target, tol) in [(Method::PureLaplace, -1.0, 0.3), (Method::ModifiedLf, -3.0, 0.4)] {
            let errors: Vec<f64> = ns.iter().map(|&n| max_error(&p, method, n, order_for(i), &r)).collect();
            let slope = loglog_slope(&nf, &errors).unwrap_or(f64::NAN);
            let pass = within(slope, target, tol);
            ok &= pass;
            lines.push(format!(
                "example {i} {method}: slope {slope:.2} (target {target}±{tol}) errors {}",
                errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join("/")
            ));
        }
    }
    verdict(ok, lines.join("; "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for i in 1..=2 {
        let p = example(i);
        let r = reference(&p);
        let [pure, original, modified] =
            [Method::PureLaplace, Method::OriginalLf, Method::ModifiedLf].map(|m| max_error(&p, m, 12, 8, &r));
        let pass = modified < original && original < pure;
        ok &= pass;
        lines.push(format!(
            "example {i}: modified {modified:.3e} < original {original:.3e} < pure {pure:.3e}: {pass}"
        ));
    }
    let p = NddeProblem::new(-1.0, 0.5, 0.5, 1.0, ExpPoly::polynomial(&[1.0, 1.0, -0.5])).unwrap();
    let original = solve_original_lf(&p, 12, 8).unwrap();
    let modified = solve_modified_lf(&p, 12, 8).unwrap();
    let diff = (0..=10_000)
        .map(|i| {
            let t = i as f64 * GRID_STEP;
            (original.evaluate(t) - modified.evaluate(t)).abs()
        })
        .fold(0.0, f64::max);
    let pass = diff <= 1e-10;
    ok &= pass;
    lines.push(format!("ab+c=0: max |original - modified| = {diff:.2e}"));
    verdict(ok, lines.join("; "))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let ks: Vec<usize> = (4..=64).collect();
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    for i in 1..=3 {
        let p = example(i);
        let family = build_pole_family(&p, 64).unwrap();
        let worst = family
            .real_poles
            .iter()
            .chain(&family.base_poles)
            .chain(&family.complex_poles)
            .map(|r| r.residual / r.value.norm().max(1.0))
            .fold(0.0, f64::max);
        let plain: Vec<f64> = ks
            .iter()
            .map(|&k| (family.complex_poles[k - 1].value - asymptotic_pole(&p, k)).norm())
            .collect();
        let improved: Vec<f64> = ks
            .iter()
            .map(|&k| (family.complex_poles[k - 1].value - improved_asymptotic_pole(&p, k)).norm())
            .collect();
        let s_plain = loglog_slope(&kf, &plain).unwrap_or(f64::NAN);
        let s_improved = loglog_slope(&kf, &improved).unwrap_or(f64::NAN);
        // Residuals are measured against 1e-12·max(1, |r|), as for every refined pole.
        let pass = worst <= 1e-12 && within(s_plain, -1.0, 0.3) && within(s_improved, -2.0, 0.3);
        ok &= pass;
        lines.push(format!(
            "example {i}: max |D(r)|/max(1,|r|) {worst:.1e}, seed slopes plain {s_plain:.2} improved {s_improved:.2}"
        ));
    }
    let p = NddeProblem::new(-1.0, 0.5, 0.5, 1.0, ExpPoly::constant(1.0)).unwrap();
    let worst = (1..=64)
        .map(|k| (refine_ladder_pole(&p, k).unwrap().value - asymptotic_pole(&p, k)).norm())
        .fold(0.0, f64::max);
    ok &= worst <= 1e-12;
    lines.push(format!("ab+c=0: max |r_k - s_k| = {worst:.1e}"));
    verdict(ok, lines.join("; "))
}

/// History `Σ p_j t^j + A·cos(ωt)` with its value and slope written out by hand.
struct RandomHistory {
    poly: Vec<f64>,
    amplitude: f64,
    omega: f64,
}

impl RandomHistory {
    fn value(&self, t: f64) -> f64 {
        self.poly.iter().rev().fold(0.0, |acc, c| acc * t + c) + self.amplitude * (self.omega * t).cos()
    }

    fn slope(&self, t: f64) -> f64 {
        let d: f64 = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| j as f64 * c * t.powi(j as i32 - 1))
            .sum();
        d - self.amplitude * self.omega * (self.omega * t).sin()
    }

    fn exp_poly(&self) -> ExpPoly {
        &ExpPoly::polynomial(&self.poly) + &ExpPoly::cos(self.omega).scale_real(self.amplitude)
    }
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.random_range(-3.0..3.0);
        let magnitude = rng.random_range(0.1..0.95);
        let b = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        let c = rng.random_range(-3.0..3.0);
        let tau = rng.random_range(0.5..2.0);
        let degree = rng.random_range(0..4usize);
        let h = RandomHistory {
            poly: (0..=degree).map(|_| rng.random_range(-3.0..3.0)).collect(),
            amplitude: rng.random_range(-2.0..2.0),
            omega: rng.random_range(0.0..5.0),
        };
        let p = NddeProblem::new(a, b, c, tau, h.exp_poly()).unwrap();
        let closed = (c * h.value(-tau) + a * h.value(0.0) + b * h.slope(-tau) - h.slope(0.0)) / tau;
        let a2 = expansion(&p, 8, ExpansionMode::Modified).unwrap().coefficient(2);
        worst = worst.max((a2 - closed).abs() / closed.abs().max(1e-300));
    }
    let pass_a = worst <= 1e-10;
    ok &= pass_a;
    lines.push(format!("(a) max relative a2 error over 50 problems {worst:.1e}"));

    let mut jump_worst: f64 = 0.0;
    let mut spec_sign_worst: f64 = 0.0;
    for i in 1..=3 {
        let p = example(i);
        let mos = method_of_steps(&p, p.tau()).unwrap();
        let jump = mos.derivative(0.0).unwrap() - p.history().derivative().eval(0.0);
        let a2 = expansion(&p, 8, ExpansionMode::Modified).unwrap().coefficient(2);
        jump_worst = jump_worst.max((a2 - jump / p.tau()).abs() / a2.abs());
        spec_sign_worst = spec_sign_worst.max((a2 + jump / p.tau()).abs() / a2.abs());
    }
    let pass_b = jump_worst <= 1e-10;
    ok &= pass_b;
    lines.push(format!(
        "(b) a2 vs +J/tau: max relative error {jump_worst:.1e} (against -J/tau: {spec_sign_worst:.1e})"
    ));

    let ks: Vec<usize> = (8..=64).collect();
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    for i in 1..=3 {
        let p = example(i);
        let family = build_pole_family(&p, 64).unwrap();
        let exact: Vec<Complex64> = ks
            .iter()
            .map(|&k| residue_at(&p, &family.complex_poles[k - 1]).unwrap().value)
            .collect();
        let mut slopes = Vec::new();
        for (mode, target) in [(ExpansionMode::Modified, -4.0), (ExpansionMode::Original, -3.0)] {
            let asymptotics = expansion(&p, 16, mode).unwrap();
            let gaps: Vec<f64> = ks
                .iter()
                .zip(&exact)
                .map(|(&k, c)| (c - asymptotic_residue(&p, k, &asymptotics)).norm())
                .collect();
            let slope = loglog_slope(&kf, &gaps).unwrap_or(f64::NAN);
            ok &= within(slope, target, 0.4);
            slopes.push(format!("{} {slope:.2} (target {target}±0.4)", mode.name()));
        }
        lines.push(format!("(c) example {i} gap slopes: {}", slopes.join(", ")));
    }
    verdict(ok, lines.join("; "))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut p2_exact = true;
    for (tau, parity) in [(1.0, Parity::Full), (2.0, Parity::Full), (1.0, Parity::Odd)] {
        let set = build_polynomials(tau, parity, 12).unwrap();
        for m in 2..=12 {
            for j in 0..21 {
                let x = tau * (j as f64 + 0.5) / 21.0;
                let sum = harmonic_partial_sum(tau, parity == Parity::Odd, m as u32, x, 100_000);
                worst = worst.max((set.eval(m, x) - sum).abs());
            }
        }
        if parity == Parity::Full {
            let expected = [tau * tau / 2.0 / 12.0, -3.0 * tau / 12.0, 3.0 / 12.0];
            p2_exact &= set.poly(2) == expected;
        }
    }
    ok &= worst <= 1e-6 && p2_exact;
    verdict(
        ok,
        format!("max |poly - 1e5-term sum| at 21 points {worst:.1e}; p2 coefficients exact: {p2_exact}"),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let histories: [fn(f64) -> f64; 3] = [
        |t| 2.0 - 48.0 * t * (1.0 + t),
        |t| 1.0 + 1.5 * (t + 2.0) * (0.5 + t),
        |t| 3.0 - 2.0 * (14.0 * t).cos(),
    ];
    for (i, h) in (1..=3).zip(histories) {
        let p = example(i);
        let r = reference(&p);
        let residual = r.mos.max_residual(12);
        let spectral = SpectralMos::new(p.a(), p.b(), p.c(), p.tau(), h, T_MAX);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let t = rng.random_range(0.0..T_MAX);
            let y = r.mos.evaluate(t).unwrap();
            worst = worst.max((y - spectral.evaluate(t)).abs() / y.abs().max(1.0));
        }
        let pass = residual <= 1e-9 && worst <= 1e-8;
        ok &= pass;
        lines.push(format!(
            "example {i}: segment residual {residual:.1e}, spectral agreement {worst:.1e}"
        ));
    }
    verdict(ok, lines.join("; "))
}

fn criterion_8() -> Outcome {
    let p = example(1);
    let sol = solve_modified_lf(&p, 50, 8).unwrap();
    let dominant = sol
        .real_residues()
        .iter()
        .max_by(|x, y| x.pole.re.total_cmp(&y.pole.re))
        .copied()
        .unwrap();
    let t = 100.0;
    let y = sol.evaluate(t);
    let mode = (dominant.value * (dominant.pole * t).exp()).re;
    let rel = (y - mode).abs() / mode.abs();
    verdict(
        rel <= 5e-3,
        format!(
            "r1 = {:.6}, c1 = {:.4}, y(100) = {y:.6}, c1·e^(100 r1) = {mode:.6}, relative gap {rel:.1e}",
            dominant.pole.re, dominant.value.re
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 (Example 3 error table)", criterion_1),
        ("2 (convergence slopes)", criterion_2),
        ("3 (method ordering)", criterion_3),
        ("4 (pole machinery)", criterion_4),
        ("5 (residue asymptotics)", criterion_5),
        ("6 (tail polynomials)", criterion_6),
        ("7 (method-of-steps oracle)", criterion_7),
        ("8 (large-t behaviour)", criterion_8),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {message}"))
        });
        match outcome {
            Ok(details) => println!("[PASS] criterion {name}: {details}"),
            Err(details) => {
                failures += 1;
                println!("[FAIL] criterion {name}: {details}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
