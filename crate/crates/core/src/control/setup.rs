use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal control problem: `C = diag(c_m)`, regularization `λ`, and the
/// target `z_T = E z_T + ∫ φ dW` with a time-constant diagonal `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSetup {
    pub gains: Vec<f64>,
    pub lambda: f64,
    pub target_mean: Vec<f64>,
    pub phi: Option<Vec<f64>>,
    /// Weight the correction integrals of the feedback bracket by the
    /// kernel `(T - r)^{η-1}`; `false` uses the bare `M_{η,η}(T - r)`.
    pub weighted_kernel: bool,
}

impl ControlSetup {
    pub fn check(&self, n_modes: usize) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(
                "control.lambda",
                format!("λ must be positive, got {}", self.lambda),
            ));
        }
        if self.gains.len() != n_modes {
            return Err(Error::param(
                "control.gains",
                format!("expected {n_modes} gains, got {}", self.gains.len()),
            ));
        }
        if self.target_mean.len() != n_modes {
            return Err(Error::param(
                "control.target_mean",
                format!("expected {n_modes} coefficients, got {}", self.target_mean.len()),
            ));
        }
        if let Some(phi) = &self.phi {
            if phi.len() != n_modes {
                return Err(Error::param(
                    "control.phi",
                    format!("expected {n_modes} entries, got {}", phi.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    /// Modes without control authority.
    pub fn uncontrollable_modes(&self) -> Vec<usize> {
        (0..self.gains.len()).filter(|&m| self.gains[m] == 0.0).collect()
    }
}
