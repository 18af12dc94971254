use std::path::{Path, PathBuf};

use super::config::ValidatedConfig;
use super::output::{write_atomic, Header, ResultTable};
use super::ConfigError;
use crate::control::{controllability_sweep, grammian_diag, FeedbackTables};
use crate::dynamics::{MildSystem, NoControl, PicardOptions};
use crate::error::{Error, Result};
use crate::specfun::{
    mittag_leffler, mittag_leffler_series, ml_via_mainardi_quadrature, LaplaceMode,
};
use crate::spectral::bound_probe;
use crate::stochastic::{bdg_check, ito_isometry, mc_collect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Validate,
    Mlfun,
    Bounds,
    Bdg,
    Solve,
    ControlSweep,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Validate => "validate",
            Subcommand::Mlfun => "mlfun",
            Subcommand::Bounds => "bounds",
            Subcommand::Bdg => "bdg",
            Subcommand::Solve => "solve",
            Subcommand::ControlSweep => "control-sweep",
        }
    }
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Passed = 0,
    ChecksFailed = 1,
    Usage = 2,
    Refused = 3,
    Computation = 4,
    Io = 5,
}

pub fn exit_code(err: &Error) -> ExitStatus {
    match err {
        Error::Config(_) | Error::Parameter { .. } => ExitStatus::Usage,
        Error::Refused(_) => ExitStatus::Refused,
        Error::Io { .. } => ExitStatus::Io,
        Error::Sample { source, .. } => exit_code(source),
        _ => ExitStatus::Computation,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub subcommand: Subcommand,
    pub tables: Vec<ResultTable>,
    pub passed: bool,
    /// Human-readable report for the terminal.
    pub summary: String,
    pub seed: u64,
    pub hash: String,
    pub canonical: String,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn rendered(&self) -> Vec<(String, String)> {
        let header = Header {
            subcommand: self.subcommand.name(),
            seed: self.seed,
            hash: &self.hash,
            canonical: &self.canonical,
        };
        self.tables
            .iter()
            .map(|t| (format!("{}.csv", t.name), t.render(&header)))
            .collect()
    }
}

/// Writes every table of `outcome` into `dir`, each atomically.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (name, contents) in outcome.rendered() {
        let path = dir.join(name);
        write_atomic(&path, &contents)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Runs a subcommand. Nothing is written; see [`write_outcome`].
pub fn run(sub: Subcommand, cfg: &ValidatedConfig, override_validation: bool) -> Result<Outcome> {
    let (tables, passed, summary) = match sub {
        Subcommand::Validate => validate(cfg)?,
        Subcommand::Mlfun => mlfun(cfg)?,
        Subcommand::Bounds => bounds(cfg)?,
        Subcommand::Bdg => bdg(cfg)?,
        Subcommand::Solve => solve(cfg, override_validation)?,
        Subcommand::ControlSweep => control_sweep(cfg, override_validation)?,
    };
    Ok(Outcome {
        subcommand: sub,
        tables,
        passed,
        summary,
        seed: cfg.config.run.seed,
        hash: cfg.hash(),
        canonical: cfg.canonical(),
    })
}

type Tables = (Vec<ResultTable>, bool, String);

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn validate(cfg: &ValidatedConfig) -> Result<Tables> {
    let mut t = ResultTable::new("validate", &["condition", "value", "passed"]);
    let mut summary = String::new();
    for (i, c) in cfg.report.conditions.iter().enumerate() {
        t.meta(c.id, c.expression);
        t.push(vec![i as f64, c.value, flag(c.passed)])?;
        summary.push_str(&format!(
            "{}  {:<44} {:>12.6}  {}\n",
            c.id,
            c.expression,
            c.value,
            verdict(c.passed)
        ));
    }
    Ok((vec![t], cfg.report.all_passed(), summary))
}

/// Independent value of `E_{a,b}(x)`: the exponential, the plain series on
/// the positive axis, or the Mainardi Laplace transform on the negative one.
fn ml_oracle(a: f64, b: f64, x: f64) -> Result<f64> {
    if a == 1.0 && b == 1.0 {
        return Ok(x.exp());
    }
    if x >= 0.0 {
        return Ok(mittag_leffler_series(a, b, x, 3000));
    }
    if a < 1.0 && b == 1.0 {
        return ml_via_mainardi_quadrature(a, -x, LaplaceMode::First);
    }
    if a < 1.0 && b == a {
        return ml_via_mainardi_quadrature(a, -x, LaplaceMode::Second);
    }
    Err(Error::Config(ConfigError {
        key: "mlfun.b".into(),
        line: None,
        message: format!("no independent reference for E_{{{a},{b}}} on the negative axis"),
    }))
}

fn mlfun(cfg: &ValidatedConfig) -> Result<Tables> {
    let ml = &cfg.config.mlfun;
    let mut t = ResultTable::new("mlfun", &["a", "b", "x", "value", "oracle", "abs_diff"]);
    t.meta("tolerance", format!("{:e} (relative above magnitude 1)", ml.tol));
    let mut passed = true;
    let mut failures = 0;
    for &a in &ml.a {
        for &b in &ml.b {
            for &x in &ml.x {
                let value = mittag_leffler(a, b, x)?;
                let oracle = ml_oracle(a, b, x)?;
                let diff = (value - oracle).abs();
                if diff > ml.tol * oracle.abs().max(1.0) {
                    passed = false;
                    failures += 1;
                }
                t.push(vec![a, b, x, value, oracle, diff])?;
            }
        }
    }
    let summary = format!("mlfun: {} rows, {failures} outside tolerance\n", t.rows.len());
    Ok((vec![t], passed, summary))
}

fn bounds(cfg: &ValidatedConfig) -> Result<Tables> {
    let model = &cfg.config.model;
    let b = &cfg.config.bounds;
    let basis = model.build_basis()?;
    let ratio = (b.t_max / b.t_min).ln();
    let t_grid: Vec<f64> = (0..b.n_t)
        .map(|i| b.t_min * (ratio * i as f64 / (b.n_t - 1) as f64).exp())
        .collect();
    let mut curve = ResultTable::new("bounds", &["beta", "t", "ratio"]);
    let mut fit = ResultTable::new(
        "bounds_fit",
        &["beta", "slope", "expected_slope", "constant", "increment_modulus", "passed"],
    );
    fit.meta("slack", b.slack);
    let mut passed = true;
    let mut summary = String::new();
    for &beta in &b.beta {
        let probe = bound_probe(&basis, model.eta, beta, &t_grid)?;
        for (t, r) in probe.t.iter().zip(&probe.ratio) {
            curve.push(vec![beta, *t, *r])?;
        }
        let ok = (probe.slope - probe.expected_slope).abs() <= b.slack;
        passed &= ok;
        fit.push(vec![
            beta,
            probe.slope,
            probe.expected_slope,
            probe.constant,
            probe.increment_modulus,
            flag(ok),
        ])?;
        summary.push_str(&format!(
            "beta {beta}: slope {:.4} expected {:.4}  {}\n",
            probe.slope,
            probe.expected_slope,
            verdict(ok)
        ));
    }
    Ok((vec![curve, fit], passed, summary))
}

fn bdg(cfg: &ValidatedConfig) -> Result<Tables> {
    let model = &cfg.config.model;
    let grid = model.grid()?;
    let basis = model.build_basis()?;
    let table = cfg.config.bdg.integrand.table(&grid, basis.frac_eigenvalues())?;
    let n = cfg.config.run.n_samples;
    let seed = cfg.config.run.seed;
    let mut t = ResultTable::new(
        "bdg",
        &["p", "kappa", "lhs", "lhs_stderr", "rhs", "ratio", "ratio_stderr", "passed"],
    );
    let mut passed = true;
    let mut summary = String::new();
    for &p in &cfg.config.bdg.p_list {
        let r = bdg_check(p, &table, &grid, &cfg.noise, n, seed)?;
        passed &= r.passed;
        t.push(vec![
            p,
            r.kappa,
            r.lhs.mean,
            r.lhs.stderr,
            r.rhs,
            r.ratio,
            r.ratio_stderr,
            flag(r.passed),
        ])?;
        summary.push_str(&format!(
            "p {p}: ratio {:.4} ± {:.4}  {}\n",
            r.ratio,
            r.ratio_stderr,
            verdict(r.passed)
        ));
    }
    let iso = ito_isometry(&table, &grid, &cfg.noise, n, seed)?;
    passed &= iso.passed;
    let mut i = ResultTable::new("isometry", &["mc_mean", "mc_stderr", "exact", "passed"]);
    i.push(vec![iso.mc.mean, iso.mc.stderr, iso.exact, flag(iso.passed)])?;
    summary.push_str(&format!(
        "isometry: {:.5} ± {:.5} vs {:.5}  {}\n",
        iso.mc.mean,
        iso.mc.stderr,
        iso.exact,
        verdict(iso.passed)
    ));
    Ok((vec![t, i], passed, summary))
}

fn build_system(cfg: &ValidatedConfig, override_validation: bool) -> Result<MildSystem> {
    MildSystem::new(
        cfg.config.model.clone(),
        cfg.config.nonlinearity.clone(),
        cfg.noise.clone(),
        cfg.noise_coeff.clone(),
        override_validation,
    )
}

fn solve(cfg: &ValidatedConfig, override_validation: bool) -> Result<Tables> {
    let system = build_system(cfg, override_validation)?;
    let s = &cfg.config.solve;
    let opts = PicardOptions {
        tol: s.tol,
        max_iter: s.max_iter,
        ..PicardOptions::deterministic()
    };
    let seed = cfg.config.run.seed;
    let results = mc_collect(s.n_paths, |i| {
        let dw = if system.is_stochastic() {
            system.sample_noise(seed, i)
        } else {
            system.zero_noise()
        };
        system.picard_solve(&cfg.z0, &dw, &NoControl, &opts)
    })?;
    let mut paths = ResultTable::new(
        "solve_paths",
        &["path", "iterations", "final_residual", "sup_norm", "terminal_norm"],
    );
    let mut norms = ResultTable::new("solve_norms", &["path", "t", "norm"]);
    let mut residuals = ResultTable::new("solve_residuals", &["path", "iteration", "residual", "ratio"]);
    let times = system.grid().times();
    for (i, r) in results.iter().enumerate() {
        let nrm = r.norms();
        let sup = nrm.iter().copied().fold(0.0, f64::max);
        paths.push(vec![
            i as f64,
            r.iterations as f64,
            r.final_residual,
            sup,
            *nrm.last().unwrap_or(&0.0),
        ])?;
        for (t, v) in times.iter().zip(&nrm) {
            norms.push(vec![i as f64, *t, *v])?;
        }
        for (k, res) in r.residual_history.iter().enumerate() {
            let ratio = if k == 0 || r.residual_history[k - 1] == 0.0 {
                0.0
            } else {
                res / r.residual_history[k - 1]
            };
            residuals.push(vec![i as f64, (k + 1) as f64, *res, ratio])?;
        }
    }
    let summary = format!(
        "solve: {} path(s), iterations {:?}\n",
        results.len(),
        results.iter().map(|r| r.iterations).collect::<Vec<_>>()
    );
    Ok((vec![paths, norms, residuals], true, summary))
}

fn control_sweep(cfg: &ValidatedConfig, override_validation: bool) -> Result<Tables> {
    let Some(setup) = &cfg.control else {
        return Err(Error::Config(ConfigError {
            key: "control".into(),
            line: None,
            message: "control-sweep needs a [control] section".into(),
        }));
    };
    let section = cfg.config.control.as_ref().expect("validated with the setup");
    let system = build_system(cfg, override_validation)?;
    crate::control::require_bounded(&system)?;
    let model = &cfg.config.model;
    let grammian = |gains: &[f64]| {
        grammian_diag(
            system.basis().frac_eigenvalues(),
            gains,
            model.eta,
            model.t_final,
            section.n_quad,
        )
    };
    let mut g = grammian(&setup.gains)?;
    let mut setup = setup.clone();
    if section.unit_grammian {
        for (c, gm) in setup.gains.iter_mut().zip(&g.gamma) {
            if *gm > 0.0 {
                *c /= gm.sqrt();
            }
        }
        g = grammian(&setup.gains)?;
    }
    let setup = &setup;
    let tables = FeedbackTables::new(&system)?;
    let opts = PicardOptions {
        tol: cfg.config.solve.tol,
        max_iter: cfg.config.solve.max_iter,
        ..PicardOptions::deterministic()
    };
    let report = controllability_sweep(
        &system,
        &tables,
        &g,
        setup,
        &cfg.z0,
        &cfg.config.run.lambda_list,
        cfg.config.run.n_samples,
        section.error_power,
        cfg.config.run.seed,
        &opts,
    )?;
    let mut sweep = ResultTable::new("control_sweep", &["lambda", "error", "stderr"]);
    sweep.meta("error_power", report.error_power);
    sweep.meta("monotone", report.monotone);
    sweep.meta(
        "loglog_slope",
        report.slope.map_or("undefined".to_string(), |s| format!("{s:e}")),
    );
    sweep.meta("weighted_kernel", setup.weighted_kernel);
    let mut summary = String::new();
    for row in &report.rows {
        sweep.push(vec![row.lambda, row.mean, row.stderr])?;
        summary.push_str(&format!(
            "lambda {:<8} error {:.6e} ± {:.2e}\n",
            row.lambda, row.mean, row.stderr
        ));
    }
    summary.push_str(&format!("monotone: {}\n", verdict(report.monotone)));
    let mut gram = ResultTable::new("control_grammian", &["mode", "gain", "gamma"]);
    for (m, (c, gm)) in setup.gains.iter().zip(&g.gamma).enumerate() {
        gram.push(vec![m as f64, *c, *gm])?;
    }
    let uncontrollable = g.uncontrollable_modes();
    if !uncontrollable.is_empty() {
        gram.meta("uncontrollable_modes", format!("{uncontrollable:?}"));
    }
    Ok((vec![sweep, gram], report.monotone, summary))
}
