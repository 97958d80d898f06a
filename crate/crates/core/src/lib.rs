//! Numerical laboratory for the two-dimensional isentropic Euler Riemann problem.
//!
//! The crate builds the classical self-similar two-shock solution for planar
//! Riemann data, searches for admissible fan subsolutions of the relaxed
//! system, compares the energy dissipation rates of both families and packages
//! the outcome as a replayable [`Certificate`].
//!
//! Module map:
//!
//! * [`gas`]: polytropic pressure law `p(rho) = rho^gamma` and energy densities.
//! * [`riemann`]: two-shock classification and middle-state construction.
//! * [`subsolution`]: fan partitions, fan subsolutions, residuals and margins.
//! * [`solver`]: elimination solve for fixed `(rho1, C)` and the parameter scan.
//! * [`dissipation`]: box energies and dissipation rates.
//! * [`weakform`]: quadrature oracle for the distributional identities.
//! * [`certificate`] and [`scenario`]: file formats used by the CLI.

// NaN must fail every validity check, so comparisons are negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod dissipation;
mod error;
pub mod gas;
pub mod parallel;
pub mod riemann;
mod roots;
pub mod scenario;
pub mod solver;
pub mod subsolution;
pub mod weakform;

pub use certificate::{certify, verify_certificate, Certificate, CertificateStatus};
pub use dissipation::DissipationReport;
pub use error::{Error, Result};
pub use gas::GasLaw;
pub use parallel::Execution;
pub use riemann::{RiemannData, SelfSimilarTwoShock};
pub use solver::{scan, solve_for, Grid, GridRange, SearchReport, SolveOptions};
pub use subsolution::{FanPartition, FanSubsolution, FeasibilityMargins, SystemResiduals};

/// Version string recorded in certificates.
pub const TOOL_VERSION: &str = concat!("disslab ", env!("CARGO_PKG_VERSION"));
