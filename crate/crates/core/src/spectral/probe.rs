//! Empirical operator-norm probes for `M_η(t)` as a map `L² → H^β`.
//!
//! Probe fields are the unit modes, for which the diagonal operator attains
//! its norm, so `R(t) = max_m λ_m^{β/2} |E_η(-μ_m t^η)|`.

use serde::Serialize;

use super::basis::Basis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundProbe {
    pub eta: f64,
    pub beta: f64,
    pub t: Vec<f64>,
    /// `R(t)` on the grid.
    pub ratio: Vec<f64>,
    /// Least-squares slope of `log R` against `log t`.
    pub slope: f64,
    /// `-ηβ/α`.
    pub expected_slope: f64,
    /// `max_t R(t) t^{ηβ/α}`.
    pub constant: f64,
    /// `max ‖(M_η(τ₂) - M_η(τ₁)) z‖_{H^β} / (τ₂ - τ₁)^{ηβ/α}` over consecutive grid pairs.
    pub increment_modulus: f64,
}

impl BoundProbe {
    /// Decay no steeper than the predicted exponent, with slack.
    pub fn slope_within(&self, slack: f64) -> bool {
        self.slope >= self.expected_slope - slack
    }
}

fn norm_ratio(basis: &Basis, eta: f64, beta: f64, t: f64) -> Result<f64> {
    let symbols = basis.ml_symbols(t, eta, 1.0)?;
    Ok(symbols
        .iter()
        .zip(basis.eigenvalues())
        .map(|(e, l)| l.powf(beta / 2.0) * e.abs())
        .fold(0.0, f64::max))
}

/// `max_m λ_m^{β/2} |E_η(-μ_m τ₂^η) - E_η(-μ_m τ₁^η)| / |τ₂ - τ₁|^{ηβ/α}`.
pub fn increment_modulus(basis: &Basis, eta: f64, beta: f64, tau1: f64, tau2: f64) -> Result<f64> {
    if tau1 == tau2 {
        return Ok(0.0);
    }
    let a = basis.ml_symbols(tau1, eta, 1.0)?;
    let b = basis.ml_symbols(tau2, eta, 1.0)?;
    let scale = (tau2 - tau1).abs().powf(eta * beta / basis.alpha());
    Ok(a.iter()
        .zip(&b)
        .zip(basis.eigenvalues())
        .map(|((x, y), l)| l.powf(beta / 2.0) * (y - x).abs() / scale)
        .fold(0.0, f64::max))
}

pub fn bound_probe(basis: &Basis, eta: f64, beta: f64, t_grid: &[f64]) -> Result<BoundProbe> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")));
    }
    if !(0.0..=basis.alpha()).contains(&beta) {
        return Err(Error::param(
            "beta",
            format!("must lie in [0, α = {}], got {beta}", basis.alpha()),
        ));
    }
    let exponent = eta * beta / basis.alpha();
    let mut ratio = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        ratio.push(norm_ratio(basis, eta, beta, t)?);
    }
    let pts: Vec<(f64, f64)> = t_grid
        .iter()
        .zip(&ratio)
        .filter(|(t, r)| **t > 0.0 && **r > 0.0 && r.is_finite())
        .map(|(t, r)| (t.ln(), r.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::numerical(
            "bound_probe",
            format!("only {} usable points for the log-log fit", pts.len()),
        ));
    }
    let slope = fit_slope(&pts);
    let constant = t_grid
        .iter()
        .zip(&ratio)
        .map(|(t, r)| r * t.powf(exponent))
        .fold(0.0, f64::max);
    let mut increment = 0.0f64;
    for w in t_grid.windows(2) {
        increment = increment.max(increment_modulus(basis, eta, beta, w[0], w[1])?);
    }
    Ok(BoundProbe {
        eta,
        beta,
        t: t_grid.to_vec(),
        ratio,
        slope,
        expected_slope: -exponent,
        constant,
        increment_modulus: increment,
    })
}

/// Ordinary least-squares slope.
pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
