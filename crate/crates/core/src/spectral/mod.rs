//! States as coefficient vectors in an analytic eigenbasis of `-Δ`, with
//! fractional powers, Sobolev norms and the Mittag-Leffler operator families
//! acting diagonally.

mod basis;
mod collocation;
mod field;
mod probe;

pub use basis::{Basis, BasisKind, TorusMode, Trig};
pub use collocation::Collocation;
pub use field::SpectralField;
pub use probe::{bound_probe, increment_modulus, BoundProbe};
pub(crate) use probe::fit_slope;
