use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of a state in an orthonormal basis, so the L² norm is the
/// Euclidean norm of the coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralField {
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::param(
                "coeffs",
                format!("coefficient {i} is not finite ({})", coeffs[i]),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![0.0; n],
        }
    }

    /// Unit vector along mode `m` (0-based).
    pub fn unit(n: usize, m: usize) -> Self {
        let mut f = Self::zeros(n);
        f.coeffs[m] = 1.0;
        f
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        l2(&self.coeffs)
    }

    pub(crate) fn scaled_by(&self, factors: &[f64]) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(factors)
                .map(|(c, f)| c * f)
                .collect(),
        }
    }
}

/// Euclidean norm with scaling against overflow.
pub(crate) fn l2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}
