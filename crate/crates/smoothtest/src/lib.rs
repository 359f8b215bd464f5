//! Two-sample tests for the equality of distributions.
//!
//! The toolkit centers on a smooth two-sample test: PIT values of one
//! sample through the other's EDF are scored against an orthonormal basis
//! (trigonometric or normalized Legendre) and the largest standardized
//! score is calibrated against the maximum of independent gaussians. A
//! projection-pursuit extension handles multivariate data by maximizing the
//! directional statistic over the unit sphere, with multiplier-bootstrap
//! critical values. Classical baselines (Kolmogorov-Smirnov,
//! Cramer-von Mises, the BGX chi-square smooth test, Baringhaus-Franz) and
//! a Monte Carlo size/power harness round out the crate.

// index loops here mirror the matrix and recurrence notation
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]

pub mod basis;
pub mod empirical;
pub mod error;
pub mod multitest;
pub mod numerics;
pub mod simlab;
pub mod unitest;

pub use basis::{BasisKind, BasisSystem};
pub use empirical::{Direction, MultiSample, UniSample};
pub use error::{Error, Result};
pub use multitest::{BootstrapResult, SphereSearchResult};
pub use numerics::{OptimConfig, RngStream};
pub use unitest::TestReport;
