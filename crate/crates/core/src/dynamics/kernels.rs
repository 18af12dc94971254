//! Tabulated Mittag-Leffler kernels of the mild formula on a uniform grid.
//!
//! With `k(s) = s^{η-1} E_{η,η}(-μ s^η)` and `h` the step:
//! - `drift[l]` = `∫_{(l-1)h}^{lh} k(s) ds`, exact through the antiderivative
//!   `s^η E_{η,η+1}(-μ s^η)`; at `η = 1` this is the exponential-Euler weight
//!   `(e^{-μ(l-1)h} - e^{-μlh})/μ`.
//! - `noise[l]` = `k(lh)`, the left-point kernel value multiplying `ΔW`.
//! - `m_eta[i]` = `E_η(-μ t_i^η)`.

use crate::error::Result;
use crate::spectral::Basis;
use crate::specfun::mittag_leffler;
use crate::stochastic::TimeGrid;

#[derive(Debug, Clone)]
pub struct MildKernels {
    eta: f64,
    n: usize,
    steps: usize,
    h: f64,
    m_eta: Vec<f64>,
    drift: Vec<f64>,
    noise: Vec<f64>,
}

impl MildKernels {
    pub fn new(basis: &Basis, eta: f64, grid: &TimeGrid) -> Result<Self> {
        let n = basis.len();
        let steps = grid.steps();
        let h = grid.h();
        let mu = basis.frac_eigenvalues();
        let mut m_eta = Vec::with_capacity((steps + 1) * n);
        for i in 0..=steps {
            let tp = grid.time(i).powf(eta);
            for m in mu {
                m_eta.push(mittag_leffler(eta, 1.0, -m * tp)?);
            }
        }
        // antiderivative of k at s = lh
        let mut prev: Vec<f64> = vec![0.0; n];
        let mut drift = Vec::with_capacity(steps * n);
        let mut noise = Vec::with_capacity(steps * n);
        for l in 1..=steps {
            let s = l as f64 * h;
            let sp = s.powf(eta);
            for (m, mu_m) in mu.iter().enumerate() {
                let anti = sp * mittag_leffler(eta, eta + 1.0, -mu_m * sp)?;
                drift.push(anti - prev[m]);
                prev[m] = anti;
                noise.push(s.powf(eta - 1.0) * mittag_leffler(eta, eta, -mu_m * sp)?);
            }
        }
        Ok(Self {
            eta,
            n,
            steps,
            h,
            m_eta,
            drift,
            noise,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `E_η(-μ t_i^η)` across modes.
    pub fn m_eta(&self, i: usize) -> &[f64] {
        &self.m_eta[i * self.n..(i + 1) * self.n]
    }

    /// Exact cell weight for lag `l ≥ 1`.
    pub fn drift(&self, l: usize) -> &[f64] {
        &self.drift[(l - 1) * self.n..l * self.n]
    }

    /// Left-point stochastic kernel for lag `l ≥ 1`.
    pub fn noise(&self, l: usize) -> &[f64] {
        &self.noise[(l - 1) * self.n..l * self.n]
    }

    pub(crate) fn drift_table(&self) -> &[f64] {
        &self.drift
    }

    pub(crate) fn noise_table(&self) -> &[f64] {
        &self.noise
    }
}

/// Exact subinterval weights `w_k(t) = ((t - t_k)^η - (t - t_{k+1})^η)/η`
/// of the bare singular kernel `(t - r)^{η-1}` for the cells left of `t`.
pub fn subinterval_weights(grid: &TimeGrid, eta: f64, t: f64) -> Vec<f64> {
    (0..grid.steps())
        .take_while(|&k| grid.time(k) < t)
        .map(|k| {
            let a = t - grid.time(k);
            let b = (t - grid.time(k + 1)).max(0.0);
            (a.powf(eta) - b.powf(eta)) / eta
        })
        .collect()
}
