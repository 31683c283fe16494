//! Simulation and statistical verification of local eigenvalue statistics
//! for random Schrödinger operators in the localized regime.
//!
//! The crate builds finite-volume Anderson and discretized continuum
//! Hamiltonians ([`model`]), counts and locates their eigenvalues through
//! matrix inertia ([`spectral`]), forms rescaled eigenvalue point processes
//! ([`pointprocess`]), and tests Wegner, Minami, Poisson and independence
//! properties of those processes ([`stats`]). [`harness`] drives
//! reproducible parallel ensembles and writes reports.

pub mod error;
pub mod harness;
pub mod model;
pub mod numeric;
pub mod pointprocess;
pub mod seeding;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
