//! Closed-loop solves and the λ-sweep of the terminal error.

use serde::Serialize;

use super::feedback::{Feedback, FeedbackTables};
use super::grammian::GrammianDiag;
use super::setup::ControlSetup;
use crate::dynamics::{MildSystem, PicardOptions, SolveResult};
use crate::error::{Error, Result};
use crate::spectral::fit_slope;
use crate::stochastic::{mc_collect, McEstimate, WienerPath};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlledRun {
    pub terminal: Vec<f64>,
    pub target: Vec<f64>,
    /// `‖z_λ(T) - z_T‖`.
    pub error: f64,
    pub iterations: usize,
    pub final_residual: f64,
}

/// Rejects systems whose drift or noise coefficient is not uniformly bounded.
pub fn require_bounded(system: &MildSystem) -> Result<()> {
    if !system.nonlinearity().spec().is_bounded() {
        return Err(Error::param(
            "nonlinearity.radius",
            "controlled runs need a finite saturation radius",
        ));
    }
    if !system.noise_coeff().is_bounded() {
        return Err(Error::param(
            "noise.coeff",
            "controlled runs need a bounded noise coefficient",
        ));
    }
    Ok(())
}

/// `z_T = E z_T + Σ_k φ ΔW_k` for one path.
pub fn target_sample(setup: &ControlSetup, dw: &WienerPath) -> Vec<f64> {
    let mut target = setup.target_mean.clone();
    if let Some(phi) = &setup.phi {
        for m in 0..target.len() {
            let w: f64 = (0..dw.grid().steps()).map(|k| dw.increment(k, m)).sum();
            target[m] += phi[m] * w;
        }
    }
    target
}

/// Fixed point of `𝓕_λ` with the feedback wired in, on a given noise path:
/// marched forward in time, then confirmed by Picard iteration.
pub fn solve_controlled(
    system: &MildSystem,
    feedback: &Feedback<'_>,
    z0: &[f64],
    dw: &WienerPath,
    opts: &PicardOptions,
) -> Result<(SolveResult, Vec<f64>)> {
    let start = system.march(z0, dw, feedback)?;
    let solved = system.picard_solve_from(z0, dw, feedback, start, opts)?;
    let target = target_sample(feedback.setup(), dw);
    Ok((solved, target))
}

/// One sample of the controlled system: `z_λ(T)` and its distance to `z_T`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_controlled(
    system: &MildSystem,
    tables: &FeedbackTables,
    grammian: &GrammianDiag,
    setup: &ControlSetup,
    z0: &[f64],
    seed: u64,
    sample_index: u64,
    opts: &PicardOptions,
) -> Result<ControlledRun> {
    require_bounded(system)?;
    let feedback = Feedback::new(tables, grammian, setup, z0)?;
    let dw = if system.is_stochastic() || setup.phi.is_some() {
        system.sample_noise(seed, sample_index)
    } else {
        system.zero_noise()
    };
    let (solved, target) = solve_controlled(system, &feedback, z0, &dw, opts)?;
    let terminal = solved.terminal().to_vec();
    let error = terminal
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ControlledRun {
        terminal,
        target,
        error,
        iterations: solved.iterations,
        final_residual: solved.final_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub error_power: f64,
    pub rows: Vec<SweepRow>,
    /// Each estimate is at most the previous one plus three combined
    /// standard errors.
    pub monotone: bool,
    /// Least-squares slope of `ln mean` against `ln λ`; `None` when some
    /// mean vanishes.
    pub slope: Option<f64>,
}

impl SweepReport {
    fn assemble(error_power: f64, rows: Vec<SweepRow>) -> Self {
        let monotone = rows.windows(2).all(|w| {
            let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            w[1].mean <= w[0].mean + slack
        });
        let slope = if rows.len() >= 2 && rows.iter().all(|r| r.mean > 0.0) {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda.ln(), r.mean.ln())).collect();
            Some(fit_slope(&pts))
        } else {
            None
        };
        Self {
            error_power,
            rows,
            monotone,
            slope,
        }
    }
}

/// Monte Carlo estimates of `E‖z_λ(T) - z_T‖^p` for each `λ`, with common
/// random numbers across `λ`. A system without noise or random target is
/// solved once per `λ` and reported with zero standard error.
#[allow(clippy::too_many_arguments)]
pub fn controllability_sweep(
    system: &MildSystem,
    tables: &FeedbackTables,
    grammian: &GrammianDiag,
    setup: &ControlSetup,
    z0: &[f64],
    lambdas: &[f64],
    n_samples: u64,
    error_power: f64,
    seed: u64,
    opts: &PicardOptions,
) -> Result<SweepReport> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::param("run.lambda_list", "λ values must be positive and finite"));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("run.lambda_list", "λ values must be strictly decreasing"));
    }
    if !(error_power > 0.0) {
        return Err(Error::param("control.error_power", "must be positive"));
    }
    require_bounded(system)?;
    let random = system.is_stochastic() || setup.phi.is_some();
    let n = if random {
        if n_samples < 2 {
            return Err(Error::param("run.n_samples", "at least two samples are required"));
        }
        n_samples
    } else {
        1
    };
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let setup = setup.with_lambda(lambda);
        let values = mc_collect(n, |i| {
            let run = simulate_controlled(system, tables, grammian, &setup, z0, seed, i, opts)?;
            Ok(run.error.powf(error_power))
        })?;
        let est = if n == 1 {
            McEstimate {
                mean: values[0],
                stderr: 0.0,
                n: 1,
            }
        } else {
            McEstimate::from_values(&values)
        };
        rows.push(SweepRow {
            lambda,
            mean: est.mean,
            stderr: est.stderr,
            samples: n,
        });
    }
    Ok(SweepReport::assemble(error_power, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackLipschitz {
    pub lambda: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Fitted exponent of `ratio ~ λ^s`.
    pub exponent: f64,
}

/// Empirical `E‖v^λ(t, z) - v^λ(t, w)‖^p / ∫_0^t E‖z - w‖^p` at `t = T`
/// for paths `z`, `w` drawn as perturbations of the uncontrolled solution.
#[allow(clippy::too_many_arguments)]
pub fn feedback_lipschitz_ratios(
    system: &MildSystem,
    tables: &FeedbackTables,
    grammian: &GrammianDiag,
    setup: &ControlSetup,
    z0: &[f64],
    lambdas: &[f64],
    p: f64,
    n_samples: u64,
    seed: u64,
) -> Result<FeedbackLipschitz> {
    let steps = system.grid().steps();
    let h = system.grid().h();
    let n = system.n_modes();
    let base = system.initial_iterate(z0);
    let mut ratio = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let setup = setup.with_lambda(lambda);
        let fb = Feedback::new(tables, grammian, &setup, z0)?;
        let pairs = mc_collect(n_samples, |i| {
            let dw = system.sample_noise(seed, i);
            let pert = system.sample_noise(seed ^ 0x9e37_79b9_7f4a_7c15, i);
            let mut w = base.clone();
            let mut walk = vec![0.0; n];
            for k in 0..steps {
                for (m, x) in walk.iter_mut().enumerate() {
                    *x += pert.increment(k, m);
                }
                for m in 0..n {
                    w[(k + 1) * n + m] += walk[m];
                }
            }
            let vz = fb.control_value(system, steps, &base, &dw)?;
            let vw = fb.control_value(system, steps, &w, &dw)?;
            let num = vz
                .iter()
                .zip(&vw)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                .powf(p);
            let den: f64 = (0..steps)
                .map(|k| {
                    let d: f64 = (0..n)
                        .map(|m| (base[k * n + m] - w[k * n + m]).powi(2))
                        .sum();
                    h * d.sqrt().powf(p)
                })
                .sum();
            Ok((num, den))
        })?;
        let num: f64 = pairs.iter().map(|x| x.0).sum();
        let den: f64 = pairs.iter().map(|x| x.1).sum();
        ratio.push(num / den);
    }
    let pts: Vec<(f64, f64)> = lambdas.iter().zip(&ratio).map(|(l, r)| (l.ln(), r.ln())).collect();
    Ok(FeedbackLipschitz {
        lambda: lambdas.to_vec(),
        ratio,
        exponent: fit_slope(&pts),
    })
}
