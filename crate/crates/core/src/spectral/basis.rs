use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::field::{l2, SpectralField};
use crate::error::{Error, Result};
use crate::specfun::mittag_leffler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `e_m(x) = √2 sin(mπx)` on `(0, 1)` with Dirichlet conditions.
    DirichletSine1d,
    /// Real divergence-free fields `√2 cos/sin(2πk·x) k⊥/|k|` on the unit torus.
    DivfreeTorus2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// One torus mode: wavevector `k` (half-plane representative) and phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusMode {
    pub k: [i32; 2],
    pub trig: Trig,
}

impl TorusMode {
    /// Unit polarization `k⊥/|k|` with `k⊥ = (-k₂, k₁)`.
    pub fn polarization(&self) -> [f64; 2] {
        let [k1, k2] = self.k.map(f64::from);
        let norm = k1.hypot(k2);
        [-k2 / norm, k1 / norm]
    }
}

/// Eigenpairs of `-Δ` truncated to `N` modes, with the fractional
/// eigenvalues `μ_m = ν λ_m^{α/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    kind: BasisKind,
    nu: f64,
    alpha: f64,
    eigenvalues: Vec<f64>,
    frac_eigenvalues: Vec<f64>,
    torus_modes: Vec<TorusMode>,
}

impl Basis {
    pub fn new(kind: BasisKind, n: usize, nu: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n_modes", "at least one mode is required"));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::param("nu", format!("viscosity must be positive, got {nu}")));
        }
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::param("alpha", format!("must lie in (1, 2], got {alpha}")));
        }
        let (eigenvalues, torus_modes): (Vec<f64>, _) = match kind {
            BasisKind::DirichletSine1d => (
                (1..=n).map(|m| (m as f64 * PI).powi(2)).collect(),
                Vec::new(),
            ),
            BasisKind::DivfreeTorus2d => {
                let modes = torus_modes(n);
                let lambda = modes
                    .iter()
                    .map(|m| 4.0 * PI * PI * f64::from(m.k[0].pow(2) + m.k[1].pow(2)))
                    .collect();
                (lambda, modes)
            }
        };
        let frac_eigenvalues = eigenvalues
            .iter()
            .map(|l: &f64| nu * l.powf(alpha / 2.0))
            .collect();
        Ok(Self {
            kind,
            nu,
            alpha,
            eigenvalues,
            frac_eigenvalues,
            torus_modes,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `λ_m` of `-Δ`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `μ_m = ν λ_m^{α/2}`.
    pub fn frac_eigenvalues(&self) -> &[f64] {
        &self.frac_eigenvalues
    }

    /// Torus modes in basis order (empty for the 1D basis).
    pub fn torus_modes(&self) -> &[TorusMode] {
        &self.torus_modes
    }

    pub(crate) fn check(&self, f: &SpectralField) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::param(
                "field",
                format!("has {} coefficients, basis has {} modes", f.len(), self.len()),
            ));
        }
        Ok(())
    }

    /// `A^γ f`: coefficients scaled by `λ_m^γ`.
    pub fn apply_fractional_power(&self, f: &SpectralField, gamma: f64) -> Result<SpectralField> {
        self.check(f)?;
        if gamma == 0.0 {
            return Ok(f.clone());
        }
        let factors: Vec<f64> = self.eigenvalues.iter().map(|l| l.powf(gamma)).collect();
        Ok(f.scaled_by(&factors))
    }

    /// `‖f‖_{H^β} = ‖A^{β/2} f‖ = (Σ λ_m^β u_m²)^{1/2}`.
    pub fn sobolev_norm(&self, f: &SpectralField, beta: f64) -> Result<f64> {
        self.check(f)?;
        Ok(self.sobolev_norm_of(f.coeffs(), beta))
    }

    pub(crate) fn sobolev_norm_of(&self, coeffs: &[f64], beta: f64) -> f64 {
        if beta == 0.0 {
            return l2(coeffs);
        }
        let weighted: Vec<f64> = coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(u, l)| u * l.powf(beta / 2.0))
            .collect();
        l2(&weighted)
    }

    /// Per-mode symbol `E_{η,b}(-μ_m t^η)` of the Mittag-Leffler families.
    pub fn ml_symbols(&self, t: f64, eta: f64, b: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain {
                function: "ml_symbols",
                value: t,
                reason: "time must be finite and non-negative",
            });
        }
        let tp = t.powf(eta);
        self.frac_eigenvalues
            .iter()
            .map(|mu| mittag_leffler(eta, b, -mu * tp))
            .collect()
    }

    /// `M_η(t) f`: `u_m ↦ E_η(-μ_m t^η) u_m`.
    pub fn apply_m_eta(&self, t: f64, f: &SpectralField, eta: f64) -> Result<SpectralField> {
        self.check(f)?;
        Ok(f.scaled_by(&self.ml_symbols(t, eta, 1.0)?))
    }

    /// `M_{η,η}(t) f`: `u_m ↦ E_{η,η}(-μ_m t^η) u_m`.
    pub fn apply_m_eta_eta(&self, t: f64, f: &SpectralField, eta: f64) -> Result<SpectralField> {
        self.check(f)?;
        Ok(f.scaled_by(&self.ml_symbols(t, eta, eta)?))
    }

    /// Value of basis function `m` at a point: `[e_m(x), 0]` in 1D, the vector
    /// field in 2D.
    pub fn mode_value(&self, m: usize, x: &[f64]) -> [f64; 2] {
        match self.kind {
            BasisKind::DirichletSine1d => {
                [SQRT_2 * ((m + 1) as f64 * PI * x[0]).sin(), 0.0]
            }
            BasisKind::DivfreeTorus2d => {
                let mode = self.torus_modes[m];
                let phase = 2.0 * PI * (f64::from(mode.k[0]) * x[0] + f64::from(mode.k[1]) * x[1]);
                let s = match mode.trig {
                    Trig::Cos => phase.cos(),
                    Trig::Sin => phase.sin(),
                };
                let p = mode.polarization();
                [SQRT_2 * s * p[0], SQRT_2 * s * p[1]]
            }
        }
    }

    /// Gradient `∂_j e^i_m` at a point, laid out `[∂₁e¹, ∂₂e¹, ∂₁e², ∂₂e²]`
    /// (1D: only the first entry is used).
    pub fn mode_gradient(&self, m: usize, x: &[f64]) -> [f64; 4] {
        match self.kind {
            BasisKind::DirichletSine1d => {
                let w = (m + 1) as f64 * PI;
                [SQRT_2 * w * (w * x[0]).cos(), 0.0, 0.0, 0.0]
            }
            BasisKind::DivfreeTorus2d => {
                let mode = self.torus_modes[m];
                let k = mode.k.map(f64::from);
                let phase = 2.0 * PI * (k[0] * x[0] + k[1] * x[1]);
                let ds = match mode.trig {
                    Trig::Cos => -phase.sin(),
                    Trig::Sin => phase.cos(),
                };
                let p = mode.polarization();
                let c = SQRT_2 * 2.0 * PI * ds;
                [c * k[0] * p[0], c * k[1] * p[0], c * k[0] * p[1], c * k[1] * p[1]]
            }
        }
    }

    /// Pointwise divergence of basis field `m` (2D), from its analytic gradient.
    pub fn mode_divergence(&self, m: usize, x: &[f64]) -> f64 {
        let g = self.mode_gradient(m, x);
        match self.kind {
            BasisKind::DirichletSine1d => g[0],
            BasisKind::DivfreeTorus2d => g[0] + g[3],
        }
    }
}

/// The first `n` real divergence-free torus modes ordered by `|k|²`.
fn torus_modes(n: usize) -> Vec<TorusMode> {
    let mut radius = 1;
    loop {
        let mut ks = Vec::new();
        for k1 in 0..=radius {
            for k2 in -radius..=radius {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                ks.push([k1, k2]);
            }
        }
        ks.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
        // every wavevector with |k|² ≤ radius² is present in the box
        let complete = ks
            .iter()
            .take_while(|k| k[0] * k[0] + k[1] * k[1] <= radius * radius)
            .count();
        if 2 * complete >= n {
            return ks
                .into_iter()
                .flat_map(|k| {
                    [
                        TorusMode { k, trig: Trig::Cos },
                        TorusMode { k, trig: Trig::Sin },
                    ]
                })
                .take(n)
                .collect();
        }
        radius += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_eigenvalues() {
        let b = Basis::new(BasisKind::DirichletSine1d, 3, 1.0, 2.0).unwrap();
        assert!((b.eigenvalues()[0] - PI * PI).abs() < 1e-14);
        assert!((b.frac_eigenvalues()[0] - PI * PI).abs() < 1e-13);
        assert!((b.eigenvalues()[2] - 9.0 * PI * PI).abs() < 1e-12);
        let b = Basis::new(BasisKind::DirichletSine1d, 1, 1.0, 1.5).unwrap();
        assert!((b.frac_eigenvalues()[0] - (PI * PI).powf(0.75)).abs() < 1e-13);
    }

    #[test]
    fn torus_modes_sorted_and_distinct() {
        let b = Basis::new(BasisKind::DivfreeTorus2d, 20, 1.0, 2.0).unwrap();
        let l = b.eigenvalues();
        assert!(l.windows(2).all(|w| w[0] <= w[1]));
        assert!((l[0] - 4.0 * PI * PI).abs() < 1e-12);
        let modes = b.torus_modes();
        for (i, a) in modes.iter().enumerate() {
            for c in &modes[i + 1..] {
                assert_ne!(a, c);
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(Basis::new(BasisKind::DirichletSine1d, 0, 1.0, 2.0).is_err());
        assert!(Basis::new(BasisKind::DirichletSine1d, 4, 0.0, 2.0).is_err());
        assert!(Basis::new(BasisKind::DirichletSine1d, 4, 1.0, 1.0).is_err());
        assert!(Basis::new(BasisKind::DirichletSine1d, 4, 1.0, 2.5).is_err());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let b = Basis::new(BasisKind::DirichletSine1d, 4, 1.0, 2.0).unwrap();
        assert!(b.sobolev_norm(&SpectralField::zeros(3), 0.0).is_err());
    }
}
