//! Independent numerical references for testing the solvers.
//!
//! Everything here works from plain closures and coefficients and shares no
//! code with the solver crate.

pub mod chebyshev;
pub mod fourier;
pub mod quadrature;
pub mod richardson;

pub use chebyshev::SpectralMos;
pub use fourier::harmonic_partial_sum;
pub use quadrature::integrate;
pub use richardson::residue_limit;
