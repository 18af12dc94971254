//! Diagonal controllability Grammian and its resolvent.
//!
//! `γ_m = c_m² ∫_0^T u^{η-1} E_{η,η}(-μ_m u^η)² du`. Substituting `w = u^η`
//! removes the weak singularity:
//! `γ_m = (c_m²/η) ∫_0^{T^η} E_{η,η}(-μ_m w)² dw`, an entire integrand that
//! is integrated by Gauss-Legendre on panels graded geometrically from the
//! decay scale `1/μ_m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spectral::SpectralField;
use crate::specfun::mittag_leffler;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrammianDiag {
    pub gamma: Vec<f64>,
    /// Total quadrature nodes used across modes.
    pub quadrature_nodes: usize,
}

impl GrammianDiag {
    /// Modes with `γ_m = 0`, i.e. no control authority.
    pub fn uncontrollable_modes(&self) -> Vec<usize> {
        (0..self.gamma.len()).filter(|&m| self.gamma[m] == 0.0).collect()
    }

    /// `λ/(λ + γ_m)`, the per-mode factor of `λ(λI + Υ)^{-1}`.
    pub fn resolvent_factors(&self, lambda: f64) -> Vec<f64> {
        self.gamma.iter().map(|g| lambda / (lambda + g)).collect()
    }
}

/// Panels `[0, s], [s, 2s], [2s, 4s], …` up to `end`, with `s = min(end, 1/μ)`.
fn graded_panels(mu: f64, end: f64) -> Vec<(f64, f64)> {
    let first = if mu > 0.0 { (1.0 / mu).min(end) } else { end };
    let mut panels = vec![(0.0, first)];
    let mut a = first;
    while a < end {
        let b = (2.0 * a).min(end);
        panels.push((a, b));
        a = b;
    }
    panels
}

/// `γ_m` for every mode; `n_quad` is the Gauss-Legendre order per panel.
pub fn grammian_diag(
    frac_eigenvalues: &[f64],
    gains: &[f64],
    eta: f64,
    t_final: f64,
    n_quad: usize,
) -> Result<GrammianDiag> {
    if n_quad < 8 {
        return Err(Error::param("n_quad", format!("at least 8 nodes required, got {n_quad}")));
    }
    if gains.len() != frac_eigenvalues.len() {
        return Err(Error::param(
            "control.gains",
            format!("expected {} gains, got {}", frac_eigenvalues.len(), gains.len()),
        ));
    }
    let rule = GaussLegendre::new(n_quad);
    let end = t_final.powf(eta);
    let mut gamma = Vec::with_capacity(gains.len());
    let mut nodes = 0;
    for (&mu, &c) in frac_eigenvalues.iter().zip(gains) {
        if c == 0.0 {
            gamma.push(0.0);
            continue;
        }
        let mut integral = 0.0;
        for (a, b) in graded_panels(mu, end) {
            for (w, weight) in rule.mapped(a, b) {
                let e = mittag_leffler(eta, eta, -mu * w)?;
                integral += weight * e * e;
                nodes += 1;
            }
        }
        gamma.push(c * c * integral / eta);
    }
    Ok(GrammianDiag {
        gamma,
        quadrature_nodes: nodes,
    })
}

/// `(λI + Υ)^{-1} f`.
pub fn resolvent_apply(g: &GrammianDiag, lambda: f64, f: &SpectralField) -> Result<SpectralField> {
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    if f.len() != g.gamma.len() {
        return Err(Error::param("field", "length does not match the Grammian"));
    }
    SpectralField::new(
        f.coeffs()
            .iter()
            .zip(&g.gamma)
            .map(|(u, gm)| u / (lambda + gm))
            .collect(),
    )
}
