//! Diagonal noise coefficient `ħ(t, z)`: mode `m` of the noise enters with
//! multiplier `σ_m` (additive) or `σ_m tanh(u_m)` (saturating).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::{GaussianStream, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseCoeffKind {
    Additive,
    SaturatingDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCoeffSpec {
    pub kind: NoiseCoeffKind,
    pub sigma: Vec<f64>,
}

impl NoiseCoeffSpec {
    pub fn additive(sigma: Vec<f64>) -> Self {
        Self {
            kind: NoiseCoeffKind::Additive,
            sigma,
        }
    }

    pub fn check(&self, n_modes: usize) -> Result<()> {
        if self.sigma.len() != n_modes {
            return Err(Error::param(
                "noise.sigma",
                format!("expected {n_modes} amplitudes, got {}", self.sigma.len()),
            ));
        }
        if let Some(s) = self.sigma.iter().find(|s| !s.is_finite()) {
            return Err(Error::param("noise.sigma", format!("amplitude {s} is not finite")));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.iter().all(|s| *s == 0.0)
    }

    /// Bounded in `z` (both kinds are).
    pub fn is_bounded(&self) -> bool {
        true
    }

    pub fn multiplier_into(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        match self.kind {
            NoiseCoeffKind::Additive => out.copy_from_slice(&self.sigma),
            NoiseCoeffKind::SaturatingDiagonal => {
                for ((o, s), u) in out.iter_mut().zip(&self.sigma).zip(z) {
                    *o = s * u.tanh();
                }
            }
        }
    }

    pub fn multiplier(&self, t: f64, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.sigma.len()];
        self.multiplier_into(t, z, &mut out);
        out
    }

    /// `‖ħ‖_{L⁰₂} = (Σ_m multiplier_m² ν_m)^{1/2}`.
    pub fn hs_norm(multiplier: &[f64], noise: &NoiseSpec) -> f64 {
        multiplier
            .iter()
            .zip(noise.q_eigenvalues())
            .map(|(h, q)| h * h * q)
            .sum::<f64>()
            .sqrt()
    }

    /// `L₁` with `‖ħ(t,z)‖_{L⁰₂} ≤ L₁(1 + ‖z‖)`.
    pub fn growth_constant(&self, noise: &NoiseSpec) -> f64 {
        Self::hs_norm(&self.sigma, noise)
    }

    /// `L₂` with `‖ħ(t,z) - ħ(t,w)‖_{L⁰₂} ≤ L₂‖z - w‖`.
    pub fn lipschitz_constant(&self, noise: &NoiseSpec) -> f64 {
        match self.kind {
            NoiseCoeffKind::Additive => 0.0,
            NoiseCoeffKind::SaturatingDiagonal => self
                .sigma
                .iter()
                .zip(noise.q_eigenvalues())
                .map(|(s, q)| s.abs() * q.sqrt())
                .fold(0.0, f64::max),
        }
    }

    /// Largest observed `‖ħ(z) - ħ(w)‖_{L⁰₂} / ‖z - w‖` over random pairs.
    pub fn empirical_lipschitz(&self, noise: &NoiseSpec, pairs: usize, seed: u64) -> f64 {
        let n = self.sigma.len();
        let mut stream = GaussianStream::new(seed, 0);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let z: Vec<f64> = (0..n).map(|_| 2.0 * stream.next_normal()).collect();
            let w: Vec<f64> = (0..n).map(|_| 2.0 * stream.next_normal()).collect();
            let hz = self.multiplier(0.0, &z);
            let hw = self.multiplier(0.0, &w);
            let d: Vec<f64> = hz.iter().zip(&hw).map(|(a, b)| a - b).collect();
            let dz = z.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(Self::hs_norm(&d, noise) / dz);
        }
        worst
    }
}
