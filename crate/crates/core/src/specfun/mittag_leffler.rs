//! Two-parameter Mittag-Leffler function `E_{a,b}(x) = Σ x^m / Γ(am + b)`
//! for real arguments, `0 < a ≤ 1`, `b > 0`.
//!
//! Small arguments use the Taylor series with term-ratio stopping. On the
//! negative axis the series cancels catastrophically once its largest term
//! grows, so past [`SERIES_PEAK_LIMIT`] we collapse the Hankel contour onto
//! the negative real axis and integrate the resulting real kernel
//!
//! ```text
//! E_{a,b}(-y) = 1/(aπ) ∫_0^∞ χ^{(1-b)/a} exp(-χ^{1/a})
//!               [χ sin(πb) + y sin(π(b-a))] / (χ² + 2yχ cos(πa) + y²) dχ
//! ```
//!
//! valid for `a < 1`, `b < 1 + a`; larger `b` is reduced with
//! `E_{a,b}(x) = (E_{a,b-a}(x) - 1/Γ(b-a)) / x`.
//!
//! Far out on the negative axis the algebraic expansion
//! `E_{a,b}(-y) ~ Σ_{k≥1} (-1)^{k+1} y^{-k} / Γ(b - ak)` is used instead,
//! truncated at its smallest term and only when that term is below
//! [`SERIES_TERM_TOL`] relative to the sum.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, power_over_gamma, rgamma, sin_pi};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, Tolerance};

/// Largest series term tolerated on the negative axis (roundoff ≈ peak · ε).
pub const SERIES_PEAK_LIMIT: f64 = 1e2;
/// Relative size of the last retained series term.
pub const SERIES_TERM_TOL: f64 = 1e-17;
pub const SERIES_MAX_TERMS: usize = 20_000;
/// Quadrature tolerance of the contour branch.
pub const CONTOUR_TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-13,
    max_intervals: 4000,
};
/// The contour kernel decays like `exp(-χ^{1/a})`; beyond this exponent the tail is below 1e-26.
const CONTOUR_TAIL_EXPONENT: f64 = 60.0;

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MlBranch {
    Closed,
    Series { terms: usize },
    Contour { evaluations: usize, error: f64 },
    Asymptotic { terms: usize },
    /// `a = 1` with `b > 1`: finite Euler-type integral.
    Euler { evaluations: usize, error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue {
    pub value: f64,
    pub branch: MlBranch,
}

/// Validated argument triple for [`MlQuery::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlQuery {
    a: f64,
    b: f64,
    x: f64,
}

impl MlQuery {
    pub fn new(a: f64, b: f64, x: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param("a", format!("order must lie in (0, 1], got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", format!("must be positive, got {b}")));
        }
        if !x.is_finite() {
            return Err(Error::Domain {
                function: "mittag_leffler",
                value: x,
                reason: "argument must be finite",
            });
        }
        Ok(Self { a, b, x })
    }

    pub fn evaluate(&self) -> Result<MlValue> {
        let v = evaluate(self.a, self.b, self.x)?;
        if !v.value.is_finite() {
            return Err(Error::numerical(
                "mittag_leffler",
                format!(
                    "E_{{{},{}}}({}) overflows double precision",
                    self.a, self.b, self.x
                ),
            ));
        }
        Ok(v)
    }
}

/// `E_{a,b}(x)`.
pub fn mittag_leffler(a: f64, b: f64, x: f64) -> Result<f64> {
    MlQuery::new(a, b, x)?.evaluate().map(|v| v.value)
}

/// Classical one-parameter function `E_a(x) = E_{a,1}(x)`.
pub fn mittag_leffler_1(a: f64, x: f64) -> Result<f64> {
    mittag_leffler(a, 1.0, x)
}

fn evaluate(a: f64, b: f64, x: f64) -> Result<MlValue> {
    if x == 0.0 {
        return Ok(MlValue {
            value: rgamma(b),
            branch: MlBranch::Closed,
        });
    }
    if a == 1.0 && b == 1.0 {
        return Ok(MlValue {
            value: x.exp(),
            branch: MlBranch::Closed,
        });
    }
    if let Some((value, terms)) = series_guarded(a, b, x) {
        return Ok(MlValue {
            value,
            branch: MlBranch::Series { terms },
        });
    }
    // only the negative axis reaches here
    if a < 1.0 {
        if b >= 1.0 + a {
            let lower = evaluate(a, b - a, x)?;
            return Ok(MlValue {
                value: (lower.value - rgamma(b - a)) / x,
                branch: lower.branch,
            });
        }
        if let Some((value, terms)) = asymptotic(a, b, -x) {
            return Ok(MlValue {
                value,
                branch: MlBranch::Asymptotic { terms },
            });
        }
        return contour(a, b, -x);
    }
    if b > 1.0 {
        return euler_integral(b, x);
    }
    let upper = evaluate(1.0, b + 1.0, x)?;
    Ok(MlValue {
        value: rgamma(b) + x * upper.value,
        branch: upper.branch,
    })
}

/// Series with the cancellation guard; `None` when the negative-axis
/// series would exceed [`SERIES_PEAK_LIMIT`].
fn series_guarded(a: f64, b: f64, x: f64) -> Option<(f64, usize)> {
    let abs_x = x.abs();
    let ln_x = abs_x.ln();
    let negative = x < 0.0;
    let ln_limit = SERIES_PEAK_LIMIT.ln();
    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut prev_ln = f64::NEG_INFINITY;
    for m in 0..SERIES_MAX_TERMS {
        let mf = m as f64;
        let ln_term = mf * ln_x - ln_gamma(a * mf + b);
        if negative && ln_term > ln_limit {
            return None;
        }
        let magnitude = power_over_gamma(ln_x, abs_x, m as i32, a * mf + b);
        let term = if negative && m % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        // Kahan summation
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        if m > 0 && ln_term < prev_ln && magnitude <= SERIES_TERM_TOL * sum.abs() + 1e-300 {
            return Some((sum, m + 1));
        }
        prev_ln = ln_term;
    }
    if negative {
        None
    } else {
        Some((sum, SERIES_MAX_TERMS))
    }
}

/// Plain truncated series with a fixed number of terms.
pub fn mittag_leffler_series(a: f64, b: f64, x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for m in 0..terms {
        let mf = m as f64;
        let term = if x == 0.0 {
            if m == 0 {
                rgamma(b)
            } else {
                0.0
            }
        } else {
            let mag = power_over_gamma(x.abs().ln(), x.abs(), m as i32, a * mf + b);
            if x < 0.0 && m % 2 == 1 {
                -mag
            } else {
                mag
            }
        };
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Large-`y` expansion of `E_{a,b}(-y)`, `0 < a < 1`; `None` unless the
/// optimally truncated remainder is negligible.
fn asymptotic(a: f64, b: f64, y: f64) -> Option<(f64, usize)> {
    // |1/Γ(b - ak)| ≤ Γ(1 - b + ak)/π once b - ak < 0; the terms grow
    // again past k ≈ y^{1/a}/a, so a short expansion is only usable for
    // large y.
    if y.powf(1.0 / a) < 30.0 {
        return None;
    }
    let ln_y = y.ln();
    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..=400usize {
        let kf = k as f64;
        let arg = b - a * kf;
        let envelope = if arg > 0.0 {
            -kf * ln_y - ln_gamma(arg)
        } else {
            -kf * ln_y + ln_gamma(1.0 - arg) - PI.ln()
        };
        if envelope > prev {
            return None;
        }
        prev = envelope;
        let mag = (-kf * ln_y).exp() * rgamma(arg);
        let term = if k % 2 == 1 { mag } else { -mag };
        let t = term - compensation;
        let next = sum + t;
        compensation = (next - sum) - t;
        sum = next;
        if sum != 0.0 && envelope.exp() <= SERIES_TERM_TOL * sum.abs() {
            return Some((sum, k));
        }
    }
    None
}

/// Real-axis contour integral for `E_{a,b}(-y)`, `y > 0`, `a < 1`, `b < 1 + a`.
fn contour(a: f64, b: f64, y: f64) -> Result<MlValue> {
    let power = (1.0 - b) / a;
    let inv_a = 1.0 / a;
    let sb = sin_pi(b);
    let sba = sin_pi(b - a);
    let ca = (PI * a).cos();
    let sa = sin_pi(a);
    let kernel = |chi: f64| {
        if chi <= 0.0 {
            return 0.0;
        }
        let denom = chi * chi + 2.0 * y * chi * ca + y * y;
        let damp = (power * chi.ln() - chi.powf(inv_a)).exp();
        damp * (chi * sb + y * sba) / denom
    };
    let chi_max = CONTOUR_TAIL_EXPONENT.powf(a);
    let mut breaks = vec![0.0, chi_max.min(1.0), chi_max];
    if ca < 0.0 {
        // near-pole of the denominator at χ = y|cos πa| with width y sin πa
        let centre = -y * ca;
        let width = y * sa;
        for p in [centre - width, centre, centre + width] {
            if p > 0.0 && p < chi_max {
                breaks.push(p);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let integral = if power < 0.0 {
        // χ^power is singular at the origin; χ = u^{1/q}, q = 1 + power,
        // absorbs it into the Jacobian.
        let q = 1.0 + power;
        let smooth = |u: f64| {
            if u <= 0.0 {
                return sba / (q * y);
            }
            let chi = u.powf(1.0 / q);
            let denom = chi * chi + 2.0 * y * chi * ca + y * y;
            (-chi.powf(inv_a)).exp() * (chi * sb + y * sba) / denom / q
        };
        let mapped: Vec<f64> = breaks.iter().map(|p| p.powf(q)).collect();
        integrate_piecewise(smooth, &mapped, CONTOUR_TOL)?
    } else {
        integrate_piecewise(kernel, &breaks, CONTOUR_TOL)?
    };
    Ok(MlValue {
        value: integral.value / (a * PI),
        branch: MlBranch::Contour {
            evaluations: integral.evaluations,
            error: integral.error / (a * PI),
        },
    })
}

/// `E_{1,b}(x) = (1/Γ(b)) ∫_0^1 exp(x (1 - u^{1/(b-1)})) du` for `b > 1`.
fn euler_integral(b: f64, x: f64) -> Result<MlValue> {
    let k = 1.0 / (b - 1.0);
    let f = |u: f64| (x * (1.0 - u.powf(k))).exp();
    let integral = integrate_piecewise(f, &[0.0, 0.5, 0.9, 0.99, 1.0], CONTOUR_TOL)?;
    let scale = rgamma(b);
    Ok(MlValue {
        value: scale * integral.value,
        branch: MlBranch::Euler {
            evaluations: integral.evaluations,
            error: scale * integral.error,
        },
    })
}
