//! The mild-solution map `𝓕_λ` on a uniform grid and its Picard iteration.
//!
//! States along a path are stored row-major, `(K + 1) × N`.

use serde::Serialize;

use super::kernels::MildKernels;
use super::noise_coeff::NoiseCoeffSpec;
use super::nonlinearity::{Nonlinearity, NonlinearitySpec};
use super::params::{validate_params, ModelParams, ValidityReport};
use crate::error::{Error, Result};
use crate::spectral::Basis;
use crate::stochastic::{sample_wiener, NoiseSpec, TimeGrid, WienerPath};

/// Everything a control law may read while `𝓕_λ` is evaluated on the
/// current iterate. Row `k` of `g` and `noise_mult` belongs to `t_k`.
pub struct ControlInputs<'a> {
    pub kernels: &'a MildKernels,
    pub path: &'a [f64],
    /// `G(z(t_k))`, `K × N`.
    pub g: &'a [f64],
    /// `ħ(t_k, z(t_k))` multipliers, `K × N`.
    pub noise_mult: &'a [f64],
    pub dw: &'a WienerPath,
}

/// Source of the control term `∫_0^{t_i} (t_i - r)^{η-1} M_{η,η}(t_i - r) C v(r) dr`.
pub trait ControlLaw: Sync {
    /// Adds the control contribution at every grid time to `out`.
    fn add_contribution(&self, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()>;

    /// Adds the contribution at `t_i` alone to `out` (one row), reading
    /// rows `k < i` of the inputs only.
    fn add_step(&self, i: usize, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()>;
}

/// `v ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoControl;

impl ControlLaw for NoControl {
    fn add_contribution(&self, _: &ControlInputs<'_>, _: &mut [f64]) -> Result<()> {
        Ok(())
    }

    fn add_step(&self, _: usize, _: &ControlInputs<'_>, _: &mut [f64]) -> Result<()> {
        Ok(())
    }
}

/// A fixed control path, constant on each cell `[t_k, t_{k+1})`, acting
/// through diagonal gains `c_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLoop {
    gains: Vec<f64>,
    values: Vec<f64>,
}

impl OpenLoop {
    /// `values` is `K × N`.
    pub fn new(gains: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if gains.is_empty() || values.len() % gains.len() != 0 {
            return Err(Error::param("control", "values must be K x N for N gains"));
        }
        Ok(Self { gains, values })
    }

    /// `L_T v = Σ_k drift(K - k) c v_k`.
    pub fn terminal_response(&self, kernels: &MildKernels) -> Result<Vec<f64>> {
        let mut out = vec![0.0; (kernels.steps() + 1) * kernels.n_modes()];
        self.accumulate(kernels, &mut out)?;
        Ok(out[kernels.steps() * kernels.n_modes()..].to_vec())
    }

    fn check(&self, kernels: &MildKernels) -> Result<()> {
        let n = kernels.n_modes();
        let steps = kernels.steps();
        if self.gains.len() != n || self.values.len() != steps * n {
            return Err(Error::param(
                "control",
                format!("open-loop path must be {steps} x {n}"),
            ));
        }
        Ok(())
    }

    fn accumulate(&self, kernels: &MildKernels, out: &mut [f64]) -> Result<()> {
        self.check(kernels)?;
        let n = kernels.n_modes();
        let steps = kernels.steps();
        let forced: Vec<f64> = self
            .values
            .chunks_exact(n)
            .flat_map(|row| row.iter().zip(&self.gains).map(|(v, c)| v * c))
            .collect();
        for i in 1..=steps {
            let (_, tail) = out.split_at_mut(i * n);
            let acc = &mut tail[..n];
            for k in 0..i {
                let w = kernels.drift(i - k);
                let f = &forced[k * n..(k + 1) * n];
                for m in 0..n {
                    acc[m] += w[m] * f[m];
                }
            }
        }
        Ok(())
    }
}

impl ControlLaw for OpenLoop {
    fn add_contribution(&self, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()> {
        self.accumulate(inputs.kernels, out)
    }

    fn add_step(&self, i: usize, inputs: &ControlInputs<'_>, out: &mut [f64]) -> Result<()> {
        self.check(inputs.kernels)?;
        let n = self.gains.len();
        for k in 0..i {
            let w = inputs.kernels.drift(i - k);
            for m in 0..n {
                out[m] += w[m] * self.gains[m] * self.values[k * n + m];
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Norm beyond which the state is declared to have blown up.
    pub blowup: f64,
}

impl PicardOptions {
    pub fn deterministic() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            blowup: 1e12,
        }
    }

    pub fn stochastic() -> Self {
        Self {
            tol: 1e-8,
            ..Self::deterministic()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    n_modes: usize,
    path: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    /// Sup-norm of each Picard update, in order.
    pub residual_history: Vec<f64>,
}

impl SolveResult {
    pub fn state(&self, i: usize) -> &[f64] {
        &self.path[i * self.n_modes..(i + 1) * self.n_modes]
    }

    pub fn terminal(&self) -> &[f64] {
        &self.path[self.path.len() - self.n_modes..]
    }

    pub fn path(&self) -> &[f64] {
        &self.path
    }

    pub fn n_steps(&self) -> usize {
        self.path.len() / self.n_modes - 1
    }

    /// `L²` norm of the state at each grid time.
    pub fn norms(&self) -> Vec<f64> {
        self.path
            .chunks_exact(self.n_modes)
            .map(|z| z.iter().map(|u| u * u).sum::<f64>().sqrt())
            .collect()
    }

    /// Successive ratios of the Picard update norms.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.residual_history
            .windows(2)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// A fully assembled model: basis, grid, kernels and coefficient maps.
#[derive(Debug, Clone)]
pub struct MildSystem {
    params: ModelParams,
    basis: Basis,
    grid: TimeGrid,
    kernels: MildKernels,
    nonlinearity: Nonlinearity,
    noise: NoiseSpec,
    coeff: NoiseCoeffSpec,
    report: ValidityReport,
}

impl MildSystem {
    /// Refuses parameter sets failing [`validate_params`] unless
    /// `override_validation` is set.
    pub fn new(
        params: ModelParams,
        nonlinearity: NonlinearitySpec,
        noise: NoiseSpec,
        coeff: NoiseCoeffSpec,
        override_validation: bool,
    ) -> Result<Self> {
        params.check()?;
        let report = validate_params(&params);
        report.enforce(override_validation)?;
        let basis = params.build_basis()?;
        let grid = params.grid()?;
        if noise.len() != basis.len() {
            return Err(Error::param(
                "noise.q_eigenvalues",
                format!("expected {} entries, got {}", basis.len(), noise.len()),
            ));
        }
        coeff.check(basis.len())?;
        let nonlinearity = Nonlinearity::new(nonlinearity, &basis)?;
        let kernels = MildKernels::new(&basis, params.eta, &grid)?;
        Ok(Self {
            params,
            basis,
            grid,
            kernels,
            nonlinearity,
            noise,
            coeff,
            report,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kernels(&self) -> &MildKernels {
        &self.kernels
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn noise_coeff(&self) -> &NoiseCoeffSpec {
        &self.coeff
    }

    pub fn validity(&self) -> &ValidityReport {
        &self.report
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    /// Whether the stochastic term can be non-zero.
    pub fn is_stochastic(&self) -> bool {
        self.noise.trace() > 0.0 && !self.coeff.is_zero()
    }

    pub fn sample_noise(&self, seed: u64, sample_index: u64) -> WienerPath {
        sample_wiener(&self.grid, &self.noise, seed, sample_index)
    }

    pub fn zero_noise(&self) -> WienerPath {
        WienerPath::zero(self.grid, self.n_modes())
    }

    /// `z^{(0)}(t_i) = M_η(t_i) z₀`.
    pub fn initial_iterate(&self, z0: &[f64]) -> Vec<f64> {
        let n = self.n_modes();
        let mut out = Vec::with_capacity((self.grid.steps() + 1) * n);
        for i in 0..=self.grid.steps() {
            out.extend(self.kernels.m_eta(i).iter().zip(z0).map(|(e, u)| e * u));
        }
        out
    }

    fn check_inputs(&self, z0: &[f64], path: &[f64], dw: &WienerPath) -> Result<()> {
        let n = self.n_modes();
        if z0.len() != n {
            return Err(Error::param("z0", format!("expected {n} coefficients, got {}", z0.len())));
        }
        if path.len() != (self.grid.steps() + 1) * n {
            return Err(Error::param("path", "path does not match the grid"));
        }
        if dw.modes() != n || dw.grid() != &self.grid {
            return Err(Error::param("dw", "Wiener path does not match the grid or modes"));
        }
        Ok(())
    }

    /// One application of `𝓕_λ` to the path `path`.
    pub fn evaluate_f_lambda(
        &self,
        z0: &[f64],
        path: &[f64],
        dw: &WienerPath,
        control: &dyn ControlLaw,
    ) -> Result<Vec<f64>> {
        self.check_inputs(z0, path, dw)?;
        let n = self.n_modes();
        let steps = self.grid.steps();
        let mut g = vec![0.0; steps * n];
        if !self.nonlinearity.is_zero() {
            let mut ws = self.nonlinearity.workspace();
            for (k, row) in g.chunks_exact_mut(n).enumerate() {
                self.nonlinearity.apply_into(&path[k * n..(k + 1) * n], row, &mut ws);
            }
        }
        let mut mult = vec![0.0; steps * n];
        let mut hdw = vec![0.0; steps * n];
        let stochastic = self.is_stochastic();
        if stochastic {
            for k in 0..steps {
                let row = &mut mult[k * n..(k + 1) * n];
                self.coeff
                    .multiplier_into(self.grid.time(k), &path[k * n..(k + 1) * n], row);
                for ((o, h), d) in hdw[k * n..(k + 1) * n].iter_mut().zip(&*row).zip(dw.step(k)) {
                    *o = h * d;
                }
            }
        }
        let mut out = self.initial_iterate(z0);
        let drift = self.kernels.drift_table();
        let noise = self.kernels.noise_table();
        let with_drift = !self.nonlinearity.is_zero();
        for i in 1..=steps {
            let acc = &mut out[i * n..(i + 1) * n];
            for k in 0..i {
                let l = i - k - 1;
                let gk = &g[k * n..(k + 1) * n];
                let hk = &hdw[k * n..(k + 1) * n];
                let d = &drift[l * n..(l + 1) * n];
                let s = &noise[l * n..(l + 1) * n];
                match (with_drift, stochastic) {
                    (true, true) => {
                        for m in 0..n {
                            acc[m] += d[m] * gk[m] + s[m] * hk[m];
                        }
                    }
                    (true, false) => {
                        for m in 0..n {
                            acc[m] += d[m] * gk[m];
                        }
                    }
                    (false, true) => {
                        for m in 0..n {
                            acc[m] += s[m] * hk[m];
                        }
                    }
                    (false, false) => {}
                }
            }
        }
        let inputs = ControlInputs {
            kernels: &self.kernels,
            path,
            g: &g,
            noise_mult: &mult,
            dw,
        };
        control.add_contribution(&inputs, &mut out)?;
        Ok(out)
    }

    fn guard(&self, path: &[f64], blowup: f64) -> Result<()> {
        for (i, z) in path.chunks_exact(self.n_modes()).enumerate() {
            let norm = z.iter().map(|u| u * u).sum::<f64>().sqrt();
            if !norm.is_finite() || norm > blowup {
                return Err(Error::BlowUp { step: i, norm });
            }
        }
        Ok(())
    }

    /// The fixed point of `𝓕_λ` by forward substitution. The discrete map
    /// only reads `z(t_k)` for `k < i` at `t_i`, so one sweep in time solves
    /// it exactly.
    pub fn march(&self, z0: &[f64], dw: &WienerPath, control: &dyn ControlLaw) -> Result<Vec<f64>> {
        let n = self.n_modes();
        let steps = self.grid.steps();
        let mut path = self.initial_iterate(z0);
        self.check_inputs(z0, &path, dw)?;
        let mut g = vec![0.0; steps * n];
        let mut mult = vec![0.0; steps * n];
        let mut hdw = vec![0.0; steps * n];
        let mut ws = self.nonlinearity.workspace();
        let drift = self.kernels.drift_table();
        let noise = self.kernels.noise_table();
        let stochastic = self.is_stochastic();
        for i in 1..=steps {
            let k = i - 1;
            let (done, rest) = path.split_at_mut(i * n);
            let zk = &done[k * n..];
            if !self.nonlinearity.is_zero() {
                self.nonlinearity.apply_into(zk, &mut g[k * n..i * n], &mut ws);
            }
            if stochastic {
                self.coeff.multiplier_into(self.grid.time(k), zk, &mut mult[k * n..i * n]);
                for m in 0..n {
                    hdw[k * n + m] = mult[k * n + m] * dw.increment(k, m);
                }
            }
            let acc = &mut rest[..n];
            for k in 0..i {
                let l = i - k - 1;
                let d = &drift[l * n..(l + 1) * n];
                let s = &noise[l * n..(l + 1) * n];
                for m in 0..n {
                    acc[m] += d[m] * g[k * n + m] + s[m] * hdw[k * n + m];
                }
            }
            let inputs = ControlInputs {
                kernels: &self.kernels,
                path: done,
                g: &g,
                noise_mult: &mult,
                dw,
            };
            control.add_step(i, &inputs, acc)?;
            let norm = acc.iter().map(|u| u * u).sum::<f64>().sqrt();
            if !norm.is_finite() || norm > PicardOptions::deterministic().blowup {
                return Err(Error::BlowUp { step: i, norm });
            }
        }
        Ok(path)
    }

    /// Picard iteration `z^{(k+1)} = 𝓕_λ z^{(k)}` from `z^{(0)} = M_η(t) z₀`.
    pub fn picard_solve(
        &self,
        z0: &[f64],
        dw: &WienerPath,
        control: &dyn ControlLaw,
        opts: &PicardOptions,
    ) -> Result<SolveResult> {
        self.picard_solve_from(z0, dw, control, self.initial_iterate(z0), opts)
    }

    /// Picard iteration from a given starting path.
    pub fn picard_solve_from(
        &self,
        z0: &[f64],
        dw: &WienerPath,
        control: &dyn ControlLaw,
        start: Vec<f64>,
        opts: &PicardOptions,
    ) -> Result<SolveResult> {
        if !(opts.tol > 0.0) {
            return Err(Error::param("tol", "Picard tolerance must be positive"));
        }
        let n = self.n_modes();
        self.check_inputs(z0, &start, dw)?;
        let mut current = start;
        let mut history = Vec::new();
        for iteration in 1..=opts.max_iter {
            let next = self.evaluate_f_lambda(z0, &current, dw, control)?;
            self.guard(&next, opts.blowup)?;
            let residual = sup_distance(&next, &current, n);
            history.push(residual);
            current = next;
            if residual < opts.tol {
                return Ok(SolveResult {
                    n_modes: n,
                    path: current,
                    iterations: iteration,
                    final_residual: residual,
                    residual_history: history,
                });
            }
        }
        Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }

    /// `sup_i ‖(𝓕_λ^j a)(t_i) - (𝓕_λ^j b)(t_i)‖` for `j = 0..=n`.
    pub fn iterate_differences(
        &self,
        z0: &[f64],
        dw: &WienerPath,
        control: &dyn ControlLaw,
        mut a: Vec<f64>,
        mut b: Vec<f64>,
        n: usize,
    ) -> Result<Vec<f64>> {
        let modes = self.n_modes();
        let mut out = vec![sup_distance(&a, &b, modes)];
        for _ in 0..n {
            a = self.evaluate_f_lambda(z0, &a, dw, control)?;
            b = self.evaluate_f_lambda(z0, &b, dw, control)?;
            out.push(sup_distance(&a, &b, modes));
        }
        Ok(out)
    }
}

/// `max_i ‖a_i - b_i‖` over grid rows.
pub(crate) fn sup_distance(a: &[f64], b: &[f64], n: usize) -> f64 {
    a.chunks_exact(n)
        .zip(b.chunks_exact(n))
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
