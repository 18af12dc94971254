//! The convective term `G(z) = -P(z·∇)z`, evaluated pseudospectrally and
//! optionally saturated by `min(1, R/‖z‖)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Basis, BasisKind, Collocation};
use crate::stochastic::GaussianStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    Zero,
    Burgers1d,
    NavierStokes2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    /// Saturation radius; `None` means no saturation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl NonlinearitySpec {
    pub fn zero() -> Self {
        Self {
            kind: NonlinearityKind::Zero,
            radius: None,
        }
    }

    /// Globally bounded realization (zero map or finite radius).
    pub fn is_bounded(&self) -> bool {
        self.kind == NonlinearityKind::Zero || self.radius.is_some()
    }
}

/// Scratch buffers reused across evaluations.
#[derive(Debug, Clone, Default)]
pub struct NonlinearityWorkspace {
    values: Vec<f64>,
    gradients: Vec<f64>,
    product: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    spec: NonlinearitySpec,
    collocation: Option<Collocation>,
    n_modes: usize,
}

impl Nonlinearity {
    pub fn new(spec: NonlinearitySpec, basis: &Basis) -> Result<Self> {
        if let Some(r) = spec.radius {
            if !(r > 0.0) {
                return Err(Error::param(
                    "nonlinearity.radius",
                    format!("saturation radius must be positive, got {r}"),
                ));
            }
        }
        let required = match spec.kind {
            NonlinearityKind::Zero => None,
            NonlinearityKind::Burgers1d => Some(BasisKind::DirichletSine1d),
            NonlinearityKind::NavierStokes2d => Some(BasisKind::DivfreeTorus2d),
        };
        if let Some(kind) = required {
            if kind != basis.kind() {
                return Err(Error::param(
                    "nonlinearity.kind",
                    format!("{:?} requires the {kind:?} basis, got {:?}", spec.kind, basis.kind()),
                ));
            }
        }
        let collocation = required.map(|_| Collocation::new(basis));
        Ok(Self {
            spec,
            collocation,
            n_modes: basis.len(),
        })
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.spec.kind == NonlinearityKind::Zero
    }

    pub fn workspace(&self) -> NonlinearityWorkspace {
        let Some(col) = &self.collocation else {
            return NonlinearityWorkspace::default();
        };
        let np = col.n_points();
        NonlinearityWorkspace {
            values: vec![0.0; col.components() * np],
            gradients: vec![0.0; col.gradient_components() * np],
            product: vec![0.0; col.components() * np],
        }
    }

    /// Writes `G_R(z)` into `out`.
    pub fn apply_into(&self, z: &[f64], out: &mut [f64], ws: &mut NonlinearityWorkspace) {
        debug_assert_eq!(z.len(), self.n_modes);
        let Some(col) = &self.collocation else {
            out.fill(0.0);
            return;
        };
        let norm_sq: f64 = z.iter().map(|u| u * u).sum();
        if norm_sq == 0.0 {
            out.fill(0.0);
            return;
        }
        let np = col.n_points();
        col.synthesize(z, &mut ws.values);
        col.synthesize_gradient(z, &mut ws.gradients);
        match self.spec.kind {
            NonlinearityKind::Burgers1d => {
                for ((p, u), ux) in ws.product.iter_mut().zip(&ws.values).zip(&ws.gradients) {
                    *p = -u * ux;
                }
            }
            NonlinearityKind::NavierStokes2d => {
                let (u1, u2) = ws.values.split_at(np);
                let g = &ws.gradients;
                let (p1, p2) = ws.product.split_at_mut(np);
                for j in 0..np {
                    p1[j] = -(u1[j] * g[j] + u2[j] * g[np + j]);
                    p2[j] = -(u1[j] * g[2 * np + j] + u2[j] * g[3 * np + j]);
                }
            }
            NonlinearityKind::Zero => unreachable!(),
        }
        col.project(&ws.product, out);
        if let Some(r) = self.spec.radius {
            let factor = (r * r / norm_sq).min(1.0);
            if factor < 1.0 {
                out.iter_mut().for_each(|g| *g *= factor);
            }
        }
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_modes];
        self.apply_into(z, &mut out, &mut self.workspace());
        out
    }
}

/// Fitted constants of `‖G(z)‖_{H^{-1}} ≤ C₁‖z‖²` and
/// `‖G(z) - G(w)‖_{H^{-1}} ≤ C₂(‖z‖ + ‖w‖)‖z - w‖` over random fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearConstants {
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

/// Random fields have Gaussian coefficients with standard deviation `1/m`.
pub fn fit_bilinear_constants(
    nl: &Nonlinearity,
    basis: &Basis,
    samples: usize,
    seed: u64,
) -> BilinearConstants {
    let n = basis.len();
    let mut stream = GaussianStream::new(seed, 0);
    let mut draw = || -> Vec<f64> {
        (0..n)
            .map(|m| stream.next_normal() / (m + 1) as f64)
            .collect()
    };
    let (mut c1, mut c2) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let z = draw();
        let w = draw();
        let gz = nl.apply(&z);
        let gw = nl.apply(&w);
        let nz = basis.sobolev_norm_of(&z, 0.0);
        let nw = basis.sobolev_norm_of(&w, 0.0);
        let diff: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
        let gdiff: Vec<f64> = gz.iter().zip(&gw).map(|(a, b)| a - b).collect();
        c1 = c1.max(basis.sobolev_norm_of(&gz, -1.0) / (nz * nz));
        c2 = c2.max(
            basis.sobolev_norm_of(&gdiff, -1.0) / ((nz + nw) * basis.sobolev_norm_of(&diff, 0.0)),
        );
    }
    BilinearConstants { c1, c2, samples }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sine_mode_product() {
        let basis = Basis::new(BasisKind::DirichletSine1d, 8, 1.0, 2.0).unwrap();
        let nl = Nonlinearity::new(
            NonlinearitySpec {
                kind: NonlinearityKind::Burgers1d,
                radius: None,
            },
            &basis,
        )
        .unwrap();
        let mut z = vec![0.0; 8];
        z[0] = 1.0;
        let g = nl.apply(&z);
        let expected = -std::f64::consts::PI / std::f64::consts::SQRT_2;
        assert!((g[1] - expected).abs() < 1e-13);
        for (m, v) in g.iter().enumerate() {
            if m != 1 {
                assert!(v.abs() < 1e-13, "mode {m}: {v}");
            }
        }
    }

    #[test]
    fn kind_must_match_basis() {
        let basis = Basis::new(BasisKind::DirichletSine1d, 4, 1.0, 2.0).unwrap();
        let spec = NonlinearitySpec {
            kind: NonlinearityKind::NavierStokes2d,
            radius: None,
        };
        assert!(Nonlinearity::new(spec, &basis).is_err());
    }

    #[test]
    fn saturation_caps_growth() {
        let basis = Basis::new(BasisKind::DirichletSine1d, 6, 1.0, 2.0).unwrap();
        let nl = Nonlinearity::new(
            NonlinearitySpec {
                kind: NonlinearityKind::Burgers1d,
                radius: Some(0.5),
            },
            &basis,
        )
        .unwrap();
        let z = vec![3.0, -2.0, 1.0, 0.5, 0.0, 0.2];
        let big: Vec<f64> = z.iter().map(|u| 10.0 * u).collect();
        let a = basis.sobolev_norm_of(&nl.apply(&z), -1.0);
        let b = basis.sobolev_norm_of(&nl.apply(&big), -1.0);
        // quadratic growth cancelled by the saturation factor
        assert!((a - b).abs() < 1e-12 * a);
    }
}
