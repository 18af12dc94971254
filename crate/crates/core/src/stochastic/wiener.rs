use serde::{Deserialize, Serialize};

use super::noise::NoiseSpec;
use super::rng::GaussianStream;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Uniform grid `t_k = k T / K`, `k = 0..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn uniform(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::param("t_final", format!("must be positive, got {t_final}")));
        }
        if steps == 0 {
            return Err(Error::param("n_steps", "at least one step is required"));
        }
        Ok(Self { t_final, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of steps `K`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_final
        } else {
            k as f64 * self.h()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }
}

/// Per-step, per-mode increments `√ν_m (ω_m(t_{k+1}) - ω_m(t_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    grid: TimeGrid,
    modes: usize,
    increments: Vec<f64>,
}

impl WienerPath {
    /// Path with all increments zero.
    pub fn zero(grid: TimeGrid, modes: usize) -> Self {
        Self {
            grid,
            modes,
            increments: vec![0.0; grid.steps() * modes],
        }
    }

    pub fn from_increments(grid: TimeGrid, modes: usize, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.steps() * modes {
            return Err(Error::param(
                "increments",
                format!(
                    "expected {} x {} entries, got {}",
                    grid.steps(),
                    modes,
                    increments.len()
                ),
            ));
        }
        Ok(Self {
            grid,
            modes,
            increments,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Row-major `K × N` increments.
    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn increments_mut(&mut self) -> &mut [f64] {
        &mut self.increments
    }

    /// Increments of step `k` across modes.
    pub fn step(&self, k: usize) -> &[f64] {
        &self.increments[k * self.modes..(k + 1) * self.modes]
    }

    pub fn increment(&self, k: usize, m: usize) -> f64 {
        self.increments[k * self.modes + m]
    }

    /// `W(T)` coefficients.
    pub fn terminal(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.modes];
        for k in 0..self.grid.steps() {
            for (a, d) in w.iter_mut().zip(self.step(k)) {
                *a += d;
            }
        }
        w
    }
}

/// One Q-Wiener path. Variate `(k, m)` is number `k N + m` of the stream
/// `(seed, sample_index)`.
pub fn sample_wiener(grid: &TimeGrid, noise: &NoiseSpec, seed: u64, sample_index: u64) -> WienerPath {
    let n = noise.len();
    let h = grid.h();
    let scale: Vec<f64> = noise.q_eigenvalues().iter().map(|q| (q * h).sqrt()).collect();
    let mut stream = GaussianStream::new(seed, sample_index);
    let mut increments = Vec::with_capacity(grid.steps() * n);
    for _ in 0..grid.steps() {
        for s in &scale {
            let z = stream.next_normal();
            increments.push(s * z);
        }
    }
    WienerPath {
        grid: *grid,
        modes: n,
        increments,
    }
}

/// Left-point Itô sum `Σ_k Φ(t_k) ΔW_k` for a diagonal integrand given as a
/// row-major `K × N` table of per-mode multipliers.
pub fn ito_integral(integrand: &[f64], path: &WienerPath) -> Result<SpectralField> {
    if integrand.len() != path.increments.len() {
        return Err(Error::param(
            "integrand",
            format!(
                "expected {} entries (steps x modes), got {}",
                path.increments.len(),
                integrand.len()
            ),
        ));
    }
    let n = path.modes;
    let mut out = vec![0.0; n];
    for (phi, dw) in integrand.chunks_exact(n).zip(path.increments.chunks_exact(n)) {
        for ((o, p), d) in out.iter_mut().zip(phi).zip(dw) {
            *o += p * d;
        }
    }
    SpectralField::new(out)
}
