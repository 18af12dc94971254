//! Trace-class Q-Wiener paths, left-point Itô sums and reproducible Monte
//! Carlo.
//!
//! Every Gaussian variate is a pure function of `(seed, sample, step, mode)`:
//! the sample index selects a ChaCha stream and `(step, mode)` a fixed word
//! offset inside it, so results do not depend on scheduling or worker count.

mod bdg;
mod montecarlo;
mod noise;
mod rng;
mod wiener;

pub use bdg::{bdg_check, bdg_kappa, ito_isometry, BdgReport, IsometryReport, ProbeIntegrand};
pub use montecarlo::{mc_collect, mc_expect, McEstimate, NeumaierSum};
pub use noise::NoiseSpec;
pub use rng::GaussianStream;
pub use wiener::{ito_integral, sample_wiener, TimeGrid, WienerPath};
