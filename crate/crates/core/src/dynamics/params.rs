use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Basis, BasisKind};
use crate::stochastic::TimeGrid;

/// Scalar model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Caputo order η.
    pub eta: f64,
    /// Fractional Laplacian exponent α.
    pub alpha: f64,
    /// Regularity index β.
    pub beta: f64,
    /// Moment order p.
    pub p: f64,
    /// Viscosity ν.
    pub nu: f64,
    /// Horizon T.
    pub t_final: f64,
    pub n_modes: usize,
    pub n_steps: usize,
    pub basis: BasisKind,
}

impl ModelParams {
    /// Range checks on individual fields. `η = 1` is admitted here (the
    /// classical limit); [`validate_params`] flags it.
    pub fn check(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Err(Error::param(format!("model.{name}"), reason));
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta", format!("η must lie in (0,1), got {}", self.eta));
        }
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return bad("alpha", format!("α must lie in (1,2], got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta < self.alpha) {
            return bad("beta", format!("β must lie in [0, α), got {}", self.beta));
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return bad("p", format!("p must be at least 2, got {}", self.p));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("nu", format!("ν must be positive, got {}", self.nu));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad("t_final", format!("T must be positive, got {}", self.t_final));
        }
        if self.n_modes == 0 {
            return bad("n_modes", "at least one mode is required".into());
        }
        if self.n_steps == 0 {
            return bad("n_steps", "at least one time step is required".into());
        }
        Ok(())
    }

    pub fn build_basis(&self) -> Result<Basis> {
        Basis::new(self.basis, self.n_modes, self.nu, self.alpha)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.t_final, self.n_steps)
    }
}

/// One exponent condition of the existence and controllability theory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub id: &'static str,
    pub expression: &'static str,
    /// The quantity whose sign (or non-vanishing, for c1) decides the condition.
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub conditions: Vec<Condition>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    /// `Ok` when every condition holds or `override_validation` is set.
    pub fn enforce(&self, override_validation: bool) -> Result<()> {
        if override_validation || self.all_passed() {
            return Ok(());
        }
        let list: Vec<String> = self
            .failed()
            .map(|c| format!("{} ({}) fails with value {}", c.id, c.expression, c.value))
            .collect();
        Err(Error::Refused(list.join("; ")))
    }
}

pub fn validate_params(mp: &ModelParams) -> ValidityReport {
    let (eta, alpha, beta, p) = (mp.eta, mp.alpha, mp.beta, mp.p);
    let positive = |id, expression, value: f64| Condition {
        id,
        expression,
        value,
        passed: value > 0.0,
    };
    let c1 = eta * p - 1.0;
    let conditions = vec![
        Condition {
            id: "c0",
            expression: "0 < eta < 1",
            value: eta,
            passed: eta > 0.0 && eta < 1.0,
        },
        Condition {
            id: "c1",
            expression: "eta*p != 1",
            value: eta * p,
            passed: c1.abs() > 1e-12,
        },
        positive("c2", "p*(1 - eta/alpha) - 1 > 0", p * (1.0 - eta / alpha) - 1.0),
        positive(
            "c3",
            "p*(eta - eta*(beta + 1)/alpha) - 1 > 0",
            p * (eta - eta * (beta + 1.0) / alpha) - 1.0,
        ),
        positive("c4", "2*p*eta - p - 2 > 0", 2.0 * p * eta - p - 2.0),
        positive(
            "c5",
            "2*p*eta*(alpha - beta) - (p + 2)*alpha > 0",
            2.0 * p * eta * (alpha - beta) - (p + 2.0) * alpha,
        ),
    ];
    ValidityReport { conditions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eta: f64, alpha: f64, beta: f64, p: f64) -> ModelParams {
        ModelParams {
            eta,
            alpha,
            beta,
            p,
            nu: 1.0,
            t_final: 1.0,
            n_modes: 4,
            n_steps: 8,
            basis: BasisKind::DirichletSine1d,
        }
    }

    #[test]
    fn worked_examples() {
        let r = validate_params(&params(0.9, 1.8, 0.2, 4.0));
        assert!(r.all_passed());
        let v: Vec<f64> = r.conditions[2..].iter().map(|c| c.value).collect();
        for (a, b) in v.iter().zip([1.0, 0.2, 1.2, 0.72]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let r = validate_params(&params(0.5, 1.8, 0.2, 2.0));
        assert!(!r.get("c1").unwrap().passed);
        let r = validate_params(&params(0.3, 1.2, 0.5, 2.0));
        let c4 = r.get("c4").unwrap();
        assert!(!c4.passed && (c4.value + 2.8).abs() < 1e-12);
    }

    #[test]
    fn refusal_and_override() {
        let r = validate_params(&params(0.5, 1.8, 0.2, 2.0));
        assert!(matches!(r.enforce(false), Err(Error::Refused(_))));
        assert!(r.enforce(true).is_ok());
    }

    #[test]
    fn range_checks_name_the_field() {
        let mut p = params(0.9, 1.8, 0.2, 4.0);
        p.beta = 2.0;
        match p.check() {
            Err(Error::Parameter { name, .. }) => assert_eq!(name, "model.beta"),
            other => panic!("{other:?}"),
        }
    }
}
