//! Controllability operator, diagonal Grammian, the regularized feedback
//! law and the approximate-controllability sweep.

mod feedback;
mod grammian;
mod setup;
mod sweep;

pub use feedback::{Feedback, FeedbackTables};
pub use grammian::{grammian_diag, resolvent_apply, GrammianDiag};
pub use setup::ControlSetup;
pub use sweep::{
    controllability_sweep, feedback_lipschitz_ratios, require_bounded, simulate_controlled,
    solve_controlled, target_sample, ControlledRun, FeedbackLipschitz, SweepReport, SweepRow,
};

use crate::dynamics::{MildKernels, OpenLoop};
use crate::error::Result;

/// `L_T v` for a control path constant on each cell, `K × N` values.
pub fn apply_lt(kernels: &MildKernels, gains: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    OpenLoop::new(gains.to_vec(), values.to_vec())?.terminal_response(kernels)
}
