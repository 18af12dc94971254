//! The regularized feedback control and its action inside `𝓕_λ`.
//!
//! On each cell `[t_k, t_{k+1})` the control is
//! `v(r) = C* M*_{η,η}(T - r) ξ_k`, where the bracket
//!
//! ```text
//! ξ_k = (λI + Υ)^{-1} [ E z_T - M_η(T) z₀ + Σ_{j<k} φ ΔW_j
//!                      - Σ_{j<k} a_j G(z(t_j)) - Σ_{j<k} b_j ħ(t_j, z(t_j)) ΔW_j ]
//! ```
//!
//! only reads history before `t_k`. With the weighted kernel `a_j` is the
//! exact cell integral of `(T - r)^{η-1} E_{η,η}(-μ(T - r)^η)` and `b_j` its
//! left-point value; otherwise `a_j = h E_{η,η}(-μ(T - t_j)^η)` and
//! `b_j = E_{η,η}(-μ(T - t_j)^η)`.
//!
//! The state picks up `Σ_{k<i} c² P_{i,k} ξ_k` with the product-integration
//! weights
//! `P_{i,k} = ∫_{t_k}^{t_{k+1}} (t_i - r)^{η-1} E_{η,η}(-μ(t_i - r)^η) E_{η,η}(-μ(T - r)^η) dr`,
//! so for a constant bracket `Σ_k c² P_{K,k} = γ` and the terminal state
//! reproduces `Υ(λI + Υ)^{-1}` exactly up to quadrature.

use super::grammian::GrammianDiag;
use super::setup::ControlSetup;
use crate::dynamics::{ControlInputs, ControlLaw, MildSystem};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::specfun::mittag_leffler;
use crate::stochastic::WienerPath;

/// Gauss-Legendre order on cells away from the kernel singularity.
const REGULAR_NODES: usize = 8;
/// Order on the cell adjacent to the evaluation time.
const SINGULAR_NODES: usize = 16;

/// λ-independent tables of the feedback law for one system.
#[derive(Debug, Clone)]
pub struct FeedbackTables {
    n: usize,
    steps: usize,
    /// `P_{i,k}` for `1 ≤ i ≤ K`, `k < i`, at row `i(i-1)/2 + k`.
    product: Vec<f64>,
    /// `E_{η,η}(-μ(T - t_k)^η)`, `k = 0..=K`.
    terminal_symbol: Vec<f64>,
    /// Bracket weights of `G`, weighted and bare, `K × N`.
    g_weight: [Vec<f64>; 2],
    /// Bracket weights of `ħ ΔW`, weighted and bare, `K × N`.
    noise_weight: [Vec<f64>; 2],
    /// `M_η(T)` symbols.
    m_eta_terminal: Vec<f64>,
}

impl FeedbackTables {
    pub fn new(system: &MildSystem) -> Result<Self> {
        let basis = system.basis();
        let grid = system.grid();
        let kernels = system.kernels();
        let eta = system.params().eta;
        let n = basis.len();
        let steps = grid.steps();
        let h = grid.h();
        let t_final = grid.t_final();
        let mu = basis.frac_eigenvalues();
        let e = |m: usize, s: f64| mittag_leffler(eta, eta, -mu[m] * s.max(0.0).powf(eta));

        let regular = GaussLegendre::new(REGULAR_NODES);
        let reg: Vec<(f64, f64)> = regular.mapped(0.0, 1.0).collect();
        let singular = GaussLegendre::new(SINGULAR_NODES);
        let sing: Vec<(f64, f64)> = singular.mapped(0.0, 1.0).collect();
        let jr = reg.len();
        let js = sing.len();

        // E_{η,η}(-μ((L - x_j)h)^η) for lags L = 1..=K; serves both the
        // kernel factor at lag L and the terminal factor of cell K - L
        let mut e_reg = vec![0.0; (steps + 1) * jr * n];
        let mut a_reg = vec![0.0; (steps + 1) * jr * n];
        for lag in 1..=steps {
            for (j, &(x, w)) in reg.iter().enumerate() {
                let s = (lag as f64 - x) * h;
                let ks = s.powf(eta - 1.0);
                for m in 0..n {
                    let idx = (lag * jr + j) * n + m;
                    e_reg[idx] = e(m, s)?;
                    a_reg[idx] = h * w * ks * e_reg[idx];
                }
            }
        }
        // adjacent cell: u = h σ^{1/η}, weight (h^η/η) ω E(-μ h^η σ)
        let mut a_sing = vec![0.0; js * n];
        let hp = h.powf(eta);
        for (j, &(sig, w)) in sing.iter().enumerate() {
            for m in 0..n {
                a_sing[j * n + m] = hp / eta * w * mittag_leffler(eta, eta, -mu[m] * hp * sig)?;
            }
        }
        // E_{η,η}(-μ(T - r)^η) at the nodes of each cell
        let mut b_sing = vec![0.0; steps * js * n];
        for k in 0..steps {
            let t_next = grid.time(k + 1);
            for (j, &(sig, _)) in sing.iter().enumerate() {
                let lag = t_final - t_next + h * sig.powf(1.0 / eta);
                for m in 0..n {
                    b_sing[(k * js + j) * n + m] = e(m, lag)?;
                }
            }
        }
        let b_reg = |k: usize, j: usize| {
            let idx = ((steps - k) * jr + j) * n;
            &e_reg[idx..idx + n]
        };

        let mut product = vec![0.0; steps * (steps + 1) / 2 * n];
        for i in 1..=steps {
            let base = i * (i - 1) / 2;
            for k in 0..i {
                let row = &mut product[(base + k) * n..(base + k + 1) * n];
                let lag = i - k;
                if lag == 1 {
                    for j in 0..js {
                        let a = &a_sing[j * n..(j + 1) * n];
                        let b = &b_sing[(k * js + j) * n..(k * js + j + 1) * n];
                        for m in 0..n {
                            row[m] += a[m] * b[m];
                        }
                    }
                } else {
                    for j in 0..jr {
                        let a = &a_reg[(lag * jr + j) * n..(lag * jr + j + 1) * n];
                        let b = b_reg(k, j);
                        for m in 0..n {
                            row[m] += a[m] * b[m];
                        }
                    }
                }
            }
        }

        let mut terminal_symbol = Vec::with_capacity((steps + 1) * n);
        for k in 0..=steps {
            let lag = t_final - grid.time(k);
            for m in 0..n {
                terminal_symbol.push(e(m, lag)?);
            }
        }
        let mut g_weighted = Vec::with_capacity(steps * n);
        let mut noise_weighted = Vec::with_capacity(steps * n);
        let mut g_bare = Vec::with_capacity(steps * n);
        for k in 0..steps {
            g_weighted.extend_from_slice(kernels.drift(steps - k));
            noise_weighted.extend_from_slice(kernels.noise(steps - k));
            g_bare.extend(terminal_symbol[k * n..(k + 1) * n].iter().map(|s| h * s));
        }
        let noise_bare = terminal_symbol[..steps * n].to_vec();
        Ok(Self {
            n,
            steps,
            product,
            terminal_symbol,
            g_weight: [g_weighted, g_bare],
            noise_weight: [noise_weighted, noise_bare],
            m_eta_terminal: kernels.m_eta(steps).to_vec(),
        })
    }

    /// `P_{i,k}` across modes.
    pub fn product(&self, i: usize, k: usize) -> &[f64] {
        let row = i * (i - 1) / 2 + k;
        &self.product[row * self.n..(row + 1) * self.n]
    }

    /// `Σ_k P_{K,k}`, the discrete counterpart of `γ_m / c_m²`.
    pub fn discrete_grammian(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for k in 0..self.steps {
            for (o, p) in out.iter_mut().zip(self.product(self.steps, k)) {
                *o += p;
            }
        }
        out
    }
}

/// The feedback law for one `λ`, bound to an initial state.
#[derive(Debug, Clone)]
pub struct Feedback<'a> {
    tables: &'a FeedbackTables,
    setup: ControlSetup,
    resolvent: Vec<f64>,
    /// `E z_T - M_η(T) z₀`.
    discrepancy: Vec<f64>,
}

impl<'a> Feedback<'a> {
    pub fn new(
        tables: &'a FeedbackTables,
        grammian: &GrammianDiag,
        setup: &ControlSetup,
        z0: &[f64],
    ) -> Result<Self> {
        setup.check(tables.n)?;
        if grammian.gamma.len() != tables.n || z0.len() != tables.n {
            return Err(Error::param("control", "Grammian or initial state has the wrong size"));
        }
        let resolvent = grammian
            .gamma
            .iter()
            .map(|g| 1.0 / (setup.lambda + g))
            .collect();
        let discrepancy = setup
            .target_mean
            .iter()
            .zip(&tables.m_eta_terminal)
            .zip(z0)
            .map(|((t, e), z)| t - e * z)
            .collect();
        Ok(Self {
            tables,
            setup: setup.clone(),
            resolvent,
            discrepancy,
        })
    }

    pub fn setup(&self) -> &ControlSetup {
        &self.setup
    }

    pub fn discrepancy(&self) -> &[f64] {
        &self.discrepancy
    }

    /// Brackets `ξ_0..=ξ_upto` from `G(z(t_j))`, `ħ(t_j, z(t_j))` and `ΔW_j`
    /// for `j < upto`.
    fn brackets(&self, g: &[f64], mult: &[f64], dw: &WienerPath, upto: usize) -> Vec<f64> {
        let n = self.tables.n;
        let variant = usize::from(!self.setup.weighted_kernel);
        let gw = &self.tables.g_weight[variant];
        let nw = &self.tables.noise_weight[variant];
        let mut acc = self.discrepancy.clone();
        let mut out = Vec::with_capacity((upto + 1) * n);
        for k in 0..=upto {
            out.extend(acc.iter().zip(&self.resolvent).map(|(a, r)| a * r));
            if k == upto {
                break;
            }
            let d = dw.step(k);
            for m in 0..n {
                let idx = k * n + m;
                let mut inc = -gw[idx] * g[idx] - nw[idx] * mult[idx] * d[m];
                if let Some(phi) = &self.setup.phi {
                    inc += phi[m] * d[m];
                }
                acc[m] += inc;
            }
        }
        out
    }

    /// `v^λ(t_k)` computed from the path and increments before `t_k` only.
    pub fn control_value(
        &self,
        system: &MildSystem,
        k: usize,
        path: &[f64],
        dw: &WienerPath,
    ) -> Result<Vec<f64>> {
        let n = self.tables.n;
        if k > self.tables.steps || path.len() < k * n {
            return Err(Error::param("history", format!("no history available up to step {k}")));
        }
        let (g, mult) = coefficient_history(system, &path[..k * n], k);
        let xi = self.brackets(&g, &mult, dw, k);
        Ok(self.values_at(k, &xi[k * n..]))
    }

    /// `v^λ(t_k) = c E_{η,η}(-μ(T - t_k)^η) ξ_k`.
    fn values_at(&self, k: usize, xi: &[f64]) -> Vec<f64> {
        let n = self.tables.n;
        let sym = &self.tables.terminal_symbol[k * n..(k + 1) * n];
        (0..n)
            .map(|m| self.setup.gains[m] * sym[m] * xi[m])
            .collect()
    }

    /// Control values at every grid time for a given path.
    pub fn control_path(&self, system: &MildSystem, path: &[f64], dw: &WienerPath) -> Vec<f64> {
        let steps = self.tables.steps;
        let n = self.tables.n;
        let (g, mult) = coefficient_history(system, &path[..steps * n], steps);
        let xi = self.brackets(&g, &mult, dw, steps);
        (0..=steps)
            .flat_map(|k| self.values_at(k, &xi[k * n..(k + 1) * n]))
            .collect()
    }

    /// `L_T v^λ = Σ_k c² P_{K,k} ξ_k` for the brackets of a given path.
    pub fn terminal_response(&self, system: &MildSystem, path: &[f64], dw: &WienerPath) -> Vec<f64> {
        let steps = self.tables.steps;
        let n = self.tables.n;
        let (g, mult) = coefficient_history(system, &path[..steps * n], steps);
        let xi = self.brackets(&g, &mult, dw, steps);
        let mut out = vec![0.0; n];
        for k in 0..steps {
            let p = self.tables.product(steps, k);
            for m in 0..n {
                out[m] += self.setup.gains[m].powi(2) * p[m] * xi[k * n + m];
            }
        }
        out
    }
}

/// `G(z(t_j))` and `ħ(t_j, z(t_j))` for `j < count`.
fn coefficient_history(system: &MildSystem, path: &[f64], count: usize) -> (Vec<f64>, Vec<f64>) {
    let n = system.n_modes();
    let nl = system.nonlinearity();
    let mut g = vec![0.0; count * n];
    let mut mult = vec![0.0; count * n];
    let mut ws = nl.workspace();
    for j in 0..count {
        let z = &path[j * n..(j + 1) * n];
        if !nl.is_zero() {
            nl.apply_into(z, &mut g[j * n..(j + 1) * n], &mut ws);
        }
        system
            .noise_coeff()
            .multiplier_into(system.grid().time(j), z, &mut mult[j * n..(j + 1) * n]);
    }
    (g, mult)
}

impl ControlLaw for Feedback<'_> {
    fn add_contribution(&self, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()> {
        let n = self.tables.n;
        let steps = self.tables.steps;
        let xi = self.brackets(inputs.g, inputs.noise_mult, inputs.dw, steps);
        let forced: Vec<f64> = xi
            .chunks_exact(n)
            .flat_map(|x| x.iter().zip(&self.setup.gains).map(|(x, c)| c * c * x))
            .collect();
        for i in 1..=steps {
            let acc = &mut out[i * n..(i + 1) * n];
            let base = i * (i - 1) / 2;
            for k in 0..i {
                let p = &self.tables.product[(base + k) * n..(base + k + 1) * n];
                let f = &forced[k * n..(k + 1) * n];
                for m in 0..n {
                    acc[m] += p[m] * f[m];
                }
            }
        }
        Ok(())
    }

    fn add_step(&self, i: usize, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()> {
        let n = self.tables.n;
        if i == 0 {
            return Ok(());
        }
        let xi = self.brackets(inputs.g, inputs.noise_mult, inputs.dw, i - 1);
        let base = i * (i - 1) / 2;
        for k in 0..i {
            let p = &self.tables.product[(base + k) * n..(base + k + 1) * n];
            for m in 0..n {
                out[m] += p[m] * self.setup.gains[m].powi(2) * xi[k * n + m];
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::grammian_diag;
    use crate::dynamics::{ModelParams, NoiseCoeffSpec, NonlinearitySpec, PicardOptions};
    use crate::spectral::BasisKind;
    use crate::stochastic::NoiseSpec;

    fn linear_system(n_modes: usize, steps: usize) -> MildSystem {
        let params = ModelParams {
            eta: 0.8,
            alpha: 1.6,
            beta: 0.0,
            p: 10.0,
            nu: 1.0,
            t_final: 1.0,
            n_modes,
            n_steps: steps,
            basis: BasisKind::DirichletSine1d,
        };
        MildSystem::new(
            params,
            NonlinearitySpec::zero(),
            NoiseSpec::zero(n_modes),
            NoiseCoeffSpec::additive(vec![0.0; n_modes]),
            false,
        )
        .unwrap()
    }

    #[test]
    fn discrete_grammian_matches_quadrature() {
        let sys = linear_system(3, 64);
        let tables = FeedbackTables::new(&sys).unwrap();
        let g = grammian_diag(sys.basis().frac_eigenvalues(), &[1.0; 3], 0.8, 1.0, 64).unwrap();
        for (a, b) in tables.discrete_grammian().iter().zip(&g.gamma) {
            assert!((a / b - 1.0).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn linear_closed_loop_error() {
        let sys = linear_system(2, 64);
        let tables = FeedbackTables::new(&sys).unwrap();
        let gains = vec![1.5, 0.0];
        let g = grammian_diag(sys.basis().frac_eigenvalues(), &gains, 0.8, 1.0, 64).unwrap();
        let setup = ControlSetup {
            gains,
            lambda: 0.1,
            target_mean: vec![0.7, -0.4],
            phi: None,
            weighted_kernel: true,
        };
        let z0 = [0.3, 0.2];
        let fb = Feedback::new(&tables, &g, &setup, &z0).unwrap();
        let d = fb.discrepancy().to_vec();
        let dw = sys.zero_noise();
        let r = sys
            .picard_solve(&z0, &dw, &fb, &PicardOptions::deterministic())
            .unwrap();
        let err: Vec<f64> = r.terminal().iter().zip(&setup.target_mean).map(|(a, b)| a - b).collect();
        let expect = -0.1 / (0.1 + g.gamma[0]) * d[0];
        assert!((err[0] / expect - 1.0).abs() < 1e-8, "{} vs {expect}", err[0]);
        assert!((err[1] + d[1]).abs() < 1e-14);
    }

    #[test]
    fn control_value_ignores_the_future() {
        let sys = linear_system(2, 16);
        let tables = FeedbackTables::new(&sys).unwrap();
        let g = grammian_diag(sys.basis().frac_eigenvalues(), &[1.0, 1.0], 0.8, 1.0, 32).unwrap();
        let setup = ControlSetup {
            gains: vec![1.0, 1.0],
            lambda: 0.5,
            target_mean: vec![1.0, 0.5],
            phi: Some(vec![0.3, 0.1]),
            weighted_kernel: true,
        };
        let z0 = [0.1, 0.0];
        let fb = Feedback::new(&tables, &g, &setup, &z0).unwrap();
        let noise = NoiseSpec::default_for(2);
        let dw = crate::stochastic::sample_wiener(sys.grid(), &noise, 7, 0);
        let path = sys.initial_iterate(&z0);
        let v = fb.control_value(&sys, 6, &path, &dw).unwrap();
        let mut dw2 = dw.clone();
        for x in &mut dw2.increments_mut()[6 * 2..] {
            *x += 1.0;
        }
        let mut path2 = path.clone();
        for x in &mut path2[7 * 2..] {
            *x -= 3.0;
        }
        assert_eq!(v, fb.control_value(&sys, 6, &path2, &dw2).unwrap());
        assert_ne!(v, fb.control_value(&sys, 7, &path2, &dw2).unwrap());
    }

    #[test]
    fn march_is_the_picard_fixed_point() {
        let params = ModelParams {
            eta: 0.9,
            alpha: 1.8,
            beta: 0.2,
            p: 4.0,
            nu: 0.2,
            t_final: 0.5,
            n_modes: 6,
            n_steps: 32,
            basis: BasisKind::DirichletSine1d,
        };
        let sys = MildSystem::new(
            params,
            NonlinearitySpec {
                kind: crate::dynamics::NonlinearityKind::Burgers1d,
                radius: Some(1.0),
            },
            NoiseSpec::default_for(6),
            NoiseCoeffSpec {
                kind: crate::dynamics::NoiseCoeffKind::SaturatingDiagonal,
                sigma: vec![0.3; 6],
            },
            false,
        )
        .unwrap();
        let tables = FeedbackTables::new(&sys).unwrap();
        let g = grammian_diag(sys.basis().frac_eigenvalues(), &[1.0; 6], 0.9, 0.5, 32).unwrap();
        let setup = ControlSetup {
            gains: vec![1.0; 6],
            lambda: 0.05,
            target_mean: vec![0.2, -0.1, 0.0, 0.0, 0.0, 0.0],
            phi: None,
            weighted_kernel: true,
        };
        let z0 = [0.5, 0.2, 0.0, 0.0, 0.0, 0.0];
        let fb = Feedback::new(&tables, &g, &setup, &z0).unwrap();
        let dw = sys.sample_noise(3, 1);
        let marched = sys.march(&z0, &dw, &fb).unwrap();
        let opts = PicardOptions {
            tol: 1e-13,
            max_iter: 200,
            ..PicardOptions::deterministic()
        };
        let picard = sys.picard_solve(&z0, &dw, &fb, &opts).unwrap();
        for (a, b) in marched.iter().zip(picard.path()) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        let again = sys.picard_solve_from(&z0, &dw, &fb, marched, &opts).unwrap();
        assert_eq!(again.iterations, 1);
    }
}
