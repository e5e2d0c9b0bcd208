use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndde_harness::plot::plot_csv;
use ndde_harness::report::{run_convergence, run_poles, run_residues, run_solve};
use ndde_harness::{HarnessError, ProblemConfig, Result};

/// Semi-analytic solvers for y'(t) = a·y(t) + b·y'(t-τ) + c·y(t-τ).
#[derive(Parser)]
#[command(name = "ndde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the solution on a grid and compare with the method of steps.
    Solve(Common),
    /// Characteristic roots with their asymptotic seeds.
    Poles(Common),
    /// Relative errors of the asymptotic residues, both expansion modes.
    Residues {
        #[command(flatten)]
        common: Common,
        /// Smallest ladder index reported.
        #[arg(long, default_value_t = 2)]
        k_min: usize,
    },
    /// Max error of the three series methods for several N.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated N values.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        n_list: Vec<usize>,
    },
    /// Render a report CSV as SVG.
    Plot {
        csv: PathBuf,
        /// Output file; defaults to the CSV path with an .svg extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// mos, pure, original or modified.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Output CSV; standard output if neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ProblemConfig> {
        let mut cfg = ProblemConfig::load(&self.config)?;
        if let Some(method) = &self.method {
            cfg.method = method.clone();
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(t_max) = self.t_max {
            cfg.t_max = t_max;
        }
        if let Some(step) = self.grid_step {
            cfg.grid_step = step;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let mut out = BufWriter::new(file);
            write(&mut out)?;
            out.flush().map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => write(&mut io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(common) => {
            let cfg = common.load()?;
            let report = run_solve(&cfg)?;
            with_output(cfg.out.as_deref(), |w| report.write_csv(w))?;
            eprintln!(
                "{}: max error {:.3e} ({:.3e} away from multiples of tau) in {:.2?}",
                report.method, report.max_error, report.max_error_away_from_joins, report.wall_time
            );
        }
        Command::Poles(common) => {
            let cfg = common.load()?;
            let report = run_poles(&cfg)?;
            with_output(cfg.out.as_deref(), |w| report.write_csv(w))?;
            let (lo, hi) = report.family.scan_window;
            eprintln!("real roots searched in [{lo}, {hi}]");
            for note in &report.family.diagnostics {
                eprintln!("note: {note}");
            }
        }
        Command::Residues { common, k_min } => {
            let cfg = common.load()?;
            let report = run_residues(&cfg, k_min)?;
            with_output(cfg.out.as_deref(), |w| report.write_csv(w))?;
        }
        Command::Convergence { common, n_list } => {
            let cfg = common.load()?;
            if n_list.is_empty() || n_list.contains(&0) {
                return Err(HarnessError::Config("--n-list needs positive integers".into()));
            }
            let report = run_convergence(&cfg, &n_list)?;
            with_output(cfg.out.as_deref(), |w| report.write_csv(w))?;
            eprintln!("convergence study finished in {:.2?}", report.wall_time);
        }
        Command::Plot { csv, out } => {
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            let kind = plot_csv(&csv, &out)?;
            eprintln!("wrote {:?} plot to {}", kind, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
