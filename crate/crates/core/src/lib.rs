//! Semi-analytic solvers for the linear neutral delay equation
//! `y'(t) = a·y(t) + b·y'(t-τ) + c·y(t-τ)` with exponential-polynomial history.
//!
//! The solution is a sum over the roots of `D(s) = s - a - (bs + c)e^{-sτ}`.
//! [`solvers`] offers the plain residue series, two variants that sum the
//! slowly decaying part of the series in closed form, and an exact method
//! of steps used as the reference.

pub mod charroots;
pub mod error;
pub mod expo_poly;
pub mod laurent;
pub mod parse;
pub mod problem;
pub mod residues;
pub mod solvers;
pub mod tail;

pub use charroots::{build_pole_family, Pole, PoleFamily, PoleKind};
pub use error::{Error, Result};
pub use expo_poly::{ExpPoly, ExpTerm};
pub use parse::parse_function;
pub use problem::{NddeProblem, Parity};
pub use residues::{ExpansionMode, Residue, ResidueAsymptotics};
pub use solvers::{method_of_steps, solve, Method, MosSolution, SeriesSolution, Solution, SolverConfig};
