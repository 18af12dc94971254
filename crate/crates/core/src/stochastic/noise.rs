use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal covariance `Q e_m = ν_m e_m` of the Wiener process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    q_eigenvalues: Vec<f64>,
}

impl NoiseSpec {
    pub fn new(q_eigenvalues: Vec<f64>) -> Result<Self> {
        if let Some((i, q)) = q_eigenvalues
            .iter()
            .enumerate()
            .find(|(_, q)| !(**q >= 0.0 && q.is_finite()))
        {
            return Err(Error::param(
                "q_eigenvalues",
                format!("entry {i} must be finite and non-negative, got {q}"),
            ));
        }
        Ok(Self { q_eigenvalues })
    }

    /// `ν_m ∝ m^{-decay}` normalized to the given trace.
    pub fn power_law(n: usize, decay: f64, trace: f64) -> Result<Self> {
        if !(decay > 1.0) {
            return Err(Error::param(
                "decay",
                format!("must exceed 1 for a summable spectrum, got {decay}"),
            ));
        }
        if !(trace >= 0.0 && trace.is_finite()) {
            return Err(Error::param("trace", format!("must be non-negative, got {trace}")));
        }
        let raw: Vec<f64> = (1..=n).map(|m| (m as f64).powf(-decay)).collect();
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|q| q * trace / total).collect())
    }

    /// Default spectrum `ν_m = m^{-2}`, normalized to `Tr Q = 1`.
    pub fn default_for(n: usize) -> Self {
        Self::power_law(n, 2.0, 1.0).expect("default spectrum is valid")
    }

    pub fn zero(n: usize) -> Self {
        Self {
            q_eigenvalues: vec![0.0; n],
        }
    }

    pub fn q_eigenvalues(&self) -> &[f64] {
        &self.q_eigenvalues
    }

    pub fn len(&self) -> usize {
        self.q_eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_eigenvalues.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.q_eigenvalues.iter().sum()
    }
}
