//! Spectral-Galerkin laboratory for time-fractional stochastic
//! Navier-Stokes-type equations: Mittag-Leffler operator calculus, mild
//! solutions by Picard iteration, and regularized feedback control.

pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod specfun;
pub mod stochastic;
pub mod dynamics;
pub mod control;
pub mod cli;

pub use error::{Error, Result};
