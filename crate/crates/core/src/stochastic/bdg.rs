//! Empirical check of the moment inequality
//! `E‖∫Φ dW‖^p ≤ κ(p) E(∫‖Φ‖²_{L⁰₂} dt)^{p/2}` for deterministic diagonal
//! integrands.

use serde::{Deserialize, Serialize};

use super::montecarlo::{mc_collect, McEstimate};
use super::noise::NoiseSpec;
use super::wiener::{ito_integral, sample_wiener, TimeGrid};
use crate::error::{Error, Result};
use crate::specfun::mittag_leffler;

/// `κ(p) = (p(p-1)/2)^{p/2} (p/(p-1))^{p(p/2-1)}`.
pub fn bdg_kappa(p: f64) -> f64 {
    (p * (p - 1.0) / 2.0).powf(p / 2.0) * (p / (p - 1.0)).powf(p * (p / 2.0 - 1.0))
}

/// Deterministic probe integrands, tabulated per step and mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeIntegrand {
    /// `Φ ≡ c·I`.
    Constant { value: f64 },
    /// `Φ(t) = t` on one mode (0-based), zero elsewhere.
    Ramp { mode: usize },
    /// `Φ_m(t) = (T-t)^{η-1} E_{η,η}(-μ_m (T-t)^η)`.
    MlKernel { eta: f64 },
}

impl ProbeIntegrand {
    /// Row-major `K × N` left-point table.
    pub fn table(&self, grid: &TimeGrid, frac_eigenvalues: &[f64]) -> Result<Vec<f64>> {
        let n = frac_eigenvalues.len();
        let mut out = vec![0.0; grid.steps() * n];
        for k in 0..grid.steps() {
            let t = grid.time(k);
            let row = &mut out[k * n..(k + 1) * n];
            match *self {
                ProbeIntegrand::Constant { value } => row.fill(value),
                ProbeIntegrand::Ramp { mode } => {
                    if mode >= n {
                        return Err(Error::param("mode", format!("{mode} is not below {n}")));
                    }
                    row[mode] = t;
                }
                ProbeIntegrand::MlKernel { eta } => {
                    let lag = grid.t_final() - t;
                    let weight = lag.powf(eta - 1.0);
                    for (r, mu) in row.iter_mut().zip(frac_eigenvalues) {
                        *r = weight * mittag_leffler(eta, eta, -mu * lag.powf(eta))?;
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdgReport {
    pub p: f64,
    pub kappa: f64,
    /// Monte Carlo estimate of `E‖∫Φ dW‖^p`.
    pub lhs: McEstimate,
    /// `κ(p) (Σ_k Σ_m Φ²_{k,m} ν_m Δt)^{p/2}` (exact for deterministic Φ).
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub mc: McEstimate,
    pub exact: f64,
    pub passed: bool,
}

fn quadratic_variation(table: &[f64], grid: &TimeGrid, noise: &NoiseSpec) -> f64 {
    let n = noise.len();
    let h = grid.h();
    table
        .chunks_exact(n)
        .map(|row| {
            row.iter()
                .zip(noise.q_eigenvalues())
                .map(|(phi, q)| phi * phi * q)
                .sum::<f64>()
                * h
        })
        .sum()
}

fn sampled_norms(
    table: &[f64],
    grid: &TimeGrid,
    noise: &NoiseSpec,
    n_samples: u64,
    seed: u64,
    power: f64,
) -> Result<McEstimate> {
    if table.len() != grid.steps() * noise.len() {
        return Err(Error::param("integrand", "table does not match grid and noise"));
    }
    if n_samples < 2 {
        return Err(Error::param("n_samples", "at least two samples are required"));
    }
    let values = mc_collect(n_samples, |i| {
        let path = sample_wiener(grid, noise, seed, i);
        Ok(ito_integral(table, &path)?.l2_norm().powf(power))
    })?;
    Ok(McEstimate::from_values(&values))
}

pub fn bdg_check(
    p: f64,
    table: &[f64],
    grid: &TimeGrid,
    noise: &NoiseSpec,
    n_samples: u64,
    seed: u64,
) -> Result<BdgReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::param("p", format!("moment order must be at least 2, got {p}")));
    }
    let kappa = bdg_kappa(p);
    let lhs = sampled_norms(table, grid, noise, n_samples, seed, p)?;
    let rhs = kappa * quadratic_variation(table, grid, noise).powf(p / 2.0);
    let (ratio, ratio_stderr) = if rhs == 0.0 {
        (0.0, 0.0)
    } else {
        (lhs.mean / rhs, lhs.stderr / rhs)
    };
    Ok(BdgReport {
        p,
        kappa,
        lhs,
        rhs,
        ratio,
        ratio_stderr,
        passed: ratio <= 1.0 + 3.0 * ratio_stderr,
    })
}

/// `E‖∫Φ dW‖²` against `Σ_k Σ_m Φ²_{k,m} ν_m Δt`, passing within three
/// standard errors.
pub fn ito_isometry(
    table: &[f64],
    grid: &TimeGrid,
    noise: &NoiseSpec,
    n_samples: u64,
    seed: u64,
) -> Result<IsometryReport> {
    let mc = sampled_norms(table, grid, noise, n_samples, seed, 2.0)?;
    let exact = quadratic_variation(table, grid, noise);
    Ok(IsometryReport {
        mc,
        exact,
        passed: (mc.mean - exact).abs() <= 3.0 * mc.stderr,
    })
}
