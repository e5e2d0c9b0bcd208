//! Reports behind the CLI subcommands, and their CSV form.
//!
//! Floats are written with 17 significant digits so that a CSV round-trips
//! every value; rows are assembled in order, so output is byte-stable.

use std::io::Write;
use std::time::{Duration, Instant};

use ndde_core::charroots::{build_pole_family, PoleFamily};
use ndde_core::residues::{expansion, residue_error_report, ExpansionMode, ResidueErrorRow};
use ndde_core::solvers::{method_of_steps, solve_series, MosSolution};
use ndde_core::{Method, NddeProblem, SolverConfig};
use rayon::prelude::*;

use crate::config::ProblemConfig;
use crate::error::Result;

/// Points within this fraction of `τ` of a multiple of `τ` are left out of
/// the diagnostic "away from joins" maximum.
pub const JOIN_EXCLUSION: f64 = 0.02;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Values of `method` on `grid`, alongside the method-of-steps reference.
pub fn evaluate_on_grid(p: &NddeProblem, config: &SolverConfig, mos: &MosSolution, grid: &[f64]) -> Result<Vec<f64>> {
    if config.method == Method::Mos {
        return Ok(grid
            .iter()
            .map(|&t| mos.evaluate(t))
            .collect::<ndde_core::Result<_>>()?);
    }
    let series = solve_series(p, config)?;
    Ok(grid.par_iter().map(|&t| series.evaluate(t)).collect())
}

fn near_join(t: f64, tau: f64) -> bool {
    let x = t / tau;
    (x - x.round()).abs() < JOIN_EXCLUSION
}

/// `(max |err|, max |err| away from multiples of τ)`.
pub fn max_errors(grid: &[f64], errors: &[f64], tau: f64) -> (f64, f64) {
    let all = errors.iter().copied().fold(0.0, f64::max);
    let away = grid
        .iter()
        .zip(errors)
        .filter(|(t, _)| !near_join(**t, tau))
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    (all, away)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRow {
    pub t: f64,
    pub y: f64,
    pub y_mos: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub rows: Vec<SolveRow>,
    pub max_error: f64,
    pub max_error_away_from_joins: f64,
    pub wall_time: Duration,
}

pub fn run_solve(cfg: &ProblemConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let p = cfg.problem()?;
    let solver = cfg.solver_config();
    let grid = cfg.grid();
    let mos = method_of_steps(&p, cfg.t_max)?;
    let reference: Vec<f64> = grid
        .iter()
        .map(|&t| mos.evaluate(t))
        .collect::<ndde_core::Result<_>>()?;
    let values = evaluate_on_grid(&p, &solver, &mos, &grid)?;
    let rows: Vec<SolveRow> = grid
        .iter()
        .zip(&values)
        .zip(&reference)
        .map(|((&t, &y), &y_mos)| SolveRow {
            t,
            y,
            y_mos,
            abs_error: (y - y_mos).abs(),
        })
        .collect();
    let errors: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
    let (max_error, max_error_away_from_joins) = max_errors(&grid, &errors, p.tau());
    Ok(SolveReport {
        method: solver.method,
        rows,
        max_error,
        max_error_away_from_joins,
        wall_time: start.elapsed(),
    })
}

impl SolveReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "y_method", "y_mos", "abs_error"])?;
        for r in &self.rows {
            w.write_record([fmt_f64(r.t), fmt_f64(r.y), fmt_f64(r.y_mos), fmt_f64(r.abs_error)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PoleReport {
    pub family: PoleFamily,
}

pub fn run_poles(cfg: &ProblemConfig) -> Result<PoleReport> {
    let p = cfg.problem()?;
    Ok(PoleReport {
        family: build_pole_family(&p, cfg.n)?,
    })
}

impl PoleReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let f = &self.family;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "k",
            "kind",
            "re",
            "im",
            "seed_re",
            "seed_im",
            "improved_re",
            "improved_im",
            "residual",
        ])?;
        for r in &f.real_poles {
            w.write_record([
                r.index.to_string(),
                "real".into(),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_f64(r.residual),
            ])?;
        }
        for r in &f.base_poles {
            w.write_record([
                "0".into(),
                "complex".into(),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_f64(r.residual),
            ])?;
        }
        for (i, r) in f.complex_poles.iter().enumerate() {
            w.write_record([
                r.index.to_string(),
                "complex".into(),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
                fmt_f64(f.seeds[i].re),
                fmt_f64(f.seeds[i].im),
                fmt_f64(f.improved_seeds[i].re),
                fmt_f64(f.improved_seeds[i].im),
                fmt_f64(r.residual),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ResidueReport {
    pub rows: Vec<ResidueErrorRow>,
}

/// Error table for both expansion modes, `k_min ≤ k ≤ N`.
pub fn run_residues(cfg: &ProblemConfig, k_min: usize) -> Result<ResidueReport> {
    let p = cfg.problem()?;
    let family = build_pole_family(&p, cfg.n)?;
    let mut rows = Vec::new();
    for mode in [ExpansionMode::Original, ExpansionMode::Modified] {
        let asymptotics = expansion(&p, cfg.m, mode)?;
        rows.extend(residue_error_report(&p, &family, &asymptotics, k_min)?);
    }
    Ok(ResidueReport { rows })
}

impl ResidueReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "mode", "re_rel_err", "im_rel_err", "flags"])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.mode.name().to_string(),
                fmt_f64(r.re_error),
                fmt_f64(r.im_error),
                r.flags.join(";"),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub const SERIES_METHODS: [Method; 3] = [Method::PureLaplace, Method::OriginalLf, Method::ModifiedLf];

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Max error per method, in [`SERIES_METHODS`] order.
    pub errors: [f64; 3],
    pub errors_away_from_joins: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slopes: [Option<f64>; 3],
    pub wall_time: Duration,
}

pub fn run_convergence(cfg: &ProblemConfig, n_list: &[usize]) -> Result<ConvergenceReport> {
    let start = Instant::now();
    let p = cfg.problem()?;
    let grid = cfg.grid();
    let mos = method_of_steps(&p, cfg.t_max)?;
    let reference: Vec<f64> = grid
        .iter()
        .map(|&t| mos.evaluate(t))
        .collect::<ndde_core::Result<_>>()?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut errors = [0.0; 3];
        let mut away = [0.0; 3];
        for (i, method) in SERIES_METHODS.iter().enumerate() {
            let config = SolverConfig::new(*method, n, cfg.m);
            let values = evaluate_on_grid(&p, &config, &mos, &grid)?;
            let diffs: Vec<f64> = values.iter().zip(&reference).map(|(y, r)| (y - r).abs()).collect();
            (errors[i], away[i]) = max_errors(&grid, &diffs, p.tau());
        }
        rows.push(ConvergenceRow {
            n,
            errors,
            errors_away_from_joins: away,
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let slopes = std::array::from_fn(|i| {
        let ys: Vec<f64> = rows.iter().map(|r| r.errors[i]).collect();
        loglog_slope(&ns, &ys)
    });
    Ok(ConvergenceReport {
        rows,
        slopes,
        wall_time: start.elapsed(),
    })
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "N",
            "max_err_pure",
            "max_err_original",
            "max_err_modified",
            "slope_pure",
            "slope_original",
            "slope_modified",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                fmt_f64(r.errors[0]),
                fmt_f64(r.errors[1]),
                fmt_f64(r.errors[2]),
                fmt_opt(self.slopes[0]),
                fmt_opt(self.slopes[1]),
                fmt_opt(self.slopes[2]),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [50.0, 100.0, 200.0, 400.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 2.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&[50.0], &[1.0]), None);
    }

    #[test]
    fn join_exclusion() {
        let grid = [0.0, 0.5, 1.0, 1.01, 1.5];
        let errors = [9.0, 1.0, 8.0, 7.0, 2.0];
        assert_eq!(max_errors(&grid, &errors, 1.0), (9.0, 2.0));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
