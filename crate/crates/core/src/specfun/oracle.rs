//! Mittag-Leffler values recomputed as Laplace transforms of the Mainardi
//! density. This route shares no code with the series/contour evaluator and
//! is used to cross-check it.

use serde::{Deserialize, Serialize};

use super::mainardi::mainardi;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceMode {
    /// `∫ K_a(s) e^{-xs} ds = E_{a,1}(-x)`
    First,
    /// `∫ a s K_a(s) e^{-xs} ds = E_{a,a}(-x)`
    Second,
}

const ORACLE_TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-12,
    max_intervals: 4000,
};

/// Upper truncation point of the half-line: the density decays like
/// `exp(-(1-a) a^{a/(1-a)} s^{1/(1-a)})`, cut where that exponent reaches 60.
fn tail_cut(a: f64) -> f64 {
    let rate = (1.0 - a) * a.powf(a / (1.0 - a));
    (60.0 / rate).powf(1.0 - a)
}

pub fn ml_via_mainardi_quadrature(a: f64, x: f64, mode: LaplaceMode) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param("a", format!("order must lie in (0, 1), got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            function: "ml_via_mainardi_quadrature",
            value: x,
            reason: "Laplace variable must be non-negative",
        });
    }
    let s_max = tail_cut(a);
    let mut breaks = vec![0.0, s_max];
    breaks.extend((1..=12).map(|j| s_max * 0.5f64.powi(j)));
    if x > 0.0 {
        breaks.extend(
            [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
                .iter()
                .map(|k| k / x)
                .filter(|&p| p < s_max),
        );
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut failure = None;
    let integrand = |s: f64| {
        let density = match mainardi(a, s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        let weight = match mode {
            LaplaceMode::First => 1.0,
            LaplaceMode::Second => a * s,
        };
        weight * density * (-x * s).exp()
    };
    let r = integrate_piecewise(integrand, &breaks, ORACLE_TOL)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value)
}
