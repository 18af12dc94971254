//! Experiment configuration: a TOML document with sections `[model]`,
//! `[nonlinearity]`, `[noise]`, `[initial]`, `[control]`, `[run]` and one
//! optional section per subcommand.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ConfigError;
use crate::control::ControlSetup;
use crate::dynamics::{
    validate_params, ModelParams, NoiseCoeffKind, NoiseCoeffSpec, NonlinearitySpec, ValidityReport,
};
use crate::error::Error;
use crate::stochastic::{NoiseSpec, ProbeIntegrand};

/// A scalar broadcast to every mode, or one value per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerMode {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerMode {
    fn expand(&self, n: usize, key: &str) -> Result<Vec<f64>, String> {
        match self {
            PerMode::Scalar(v) => Ok(vec![*v; n]),
            PerMode::List(v) if v.len() == n => Ok(v.clone()),
            PerMode::List(v) => Err(format!(
                "{key} needs {n} entries (one per mode), got {}",
                v.len()
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Explicit `Q` eigenvalues; otherwise `ν_m ∝ m^{-decay}` with the given trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_eigenvalues: Option<Vec<f64>>,
    #[serde(default = "default_decay")]
    pub decay: f64,
    #[serde(default = "default_trace")]
    pub trace: f64,
    #[serde(default = "default_coeff")]
    pub coeff: NoiseCoeffKind,
    #[serde(default = "default_sigma")]
    pub sigma: PerMode,
}

fn default_decay() -> f64 {
    2.0
}
fn default_trace() -> f64 {
    1.0
}
fn default_coeff() -> NoiseCoeffKind {
    NoiseCoeffKind::Additive
}
fn default_sigma() -> PerMode {
    PerMode::Scalar(0.0)
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            q_eigenvalues: None,
            decay: default_decay(),
            trace: default_trace(),
            coeff: default_coeff(),
            sigma: default_sigma(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Leading coefficients of `z₀`; the rest are zero.
    #[serde(default)]
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(default = "default_gain")]
    pub gains: PerMode,
    /// Leading coefficients of `E z_T`; the rest are zero.
    #[serde(default)]
    pub target_mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PerMode>,
    #[serde(default = "yes")]
    pub weighted_kernel: bool,
    /// Moment of the terminal error reported by the sweep.
    #[serde(default = "default_error_power")]
    pub error_power: f64,
    #[serde(default = "default_n_quad")]
    pub n_quad: usize,
    /// Rescale every nonzero gain so that its Grammian entry is 1.
    #[serde(default)]
    pub unit_grammian: bool,
}

fn default_gain() -> PerMode {
    PerMode::Scalar(1.0)
}
fn yes() -> bool {
    true
}
fn default_error_power() -> f64 {
    2.0
}
fn default_n_quad() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    #[serde(default = "default_lambdas")]
    pub lambda_list: Vec<f64>,
    /// Output directory; not part of the canonical form.
    #[serde(default = "default_output", skip_serializing)]
    pub output_path: String,
}

fn default_n_samples() -> u64 {
    100
}
fn default_lambdas() -> Vec<f64> {
    vec![1.0, 0.1, 0.01]
}
fn default_output() -> String {
    "out".into()
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            n_samples: default_n_samples(),
            lambda_list: default_lambdas(),
            output_path: default_output(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlfunSection {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(default = "default_ml_tol")]
    pub tol: f64,
}

fn default_ml_tol() -> f64 {
    1e-8
}

impl Default for MlfunSection {
    fn default() -> Self {
        Self {
            a: vec![0.3, 0.5, 0.7, 0.9, 1.0],
            b: vec![1.0],
            x: vec![-50.0, -5.0, -0.5, 1.0],
            tol: default_ml_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub beta: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    /// Allowed distance between fitted and predicted decay exponents.
    pub slack: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            beta: vec![0.0, 0.5],
            t_min: 1e-3,
            t_max: 1.0,
            n_t: 12,
            slack: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdgSection {
    pub p_list: Vec<f64>,
    pub integrand: ProbeIntegrand,
}

impl Default for BdgSection {
    fn default() -> Self {
        Self {
            p_list: vec![2.0, 4.0],
            integrand: ProbeIntegrand::Constant { value: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub tol: f64,
    pub max_iter: usize,
    /// Number of noise paths solved.
    pub n_paths: u64,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            n_paths: 1,
        }
    }
}

/// The parsed document, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    #[serde(default = "NonlinearitySpec::zero")]
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSection>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub mlfun: MlfunSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub bdg: BdgSection,
    #[serde(default)]
    pub solve: SolveSection,
}

/// A configuration that passed every structural and range check.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    pub config: ExperimentConfig,
    pub noise: NoiseSpec,
    pub noise_coeff: NoiseCoeffSpec,
    pub z0: Vec<f64>,
    pub control: Option<ControlSetup>,
    pub report: ValidityReport,
}

impl ValidatedConfig {
    /// Canonical TOML of the resolved configuration.
    pub fn canonical(&self) -> String {
        canonical_toml(&self.config)
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        config_hash(&self.canonical())
    }
}

pub fn canonical_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("configuration serializes")
}

pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 1-based line of a dotted key, found by scanning table headers and
/// `key = value` lines.
pub fn locate_key(text: &str, dotted: &str) -> Option<usize> {
    let mut table = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let name = line.trim_start_matches('[');
            let name = name.split(']').next().unwrap_or("").trim();
            table = name.to_string();
            if table == dotted {
                return Some(i + 1);
            }
            continue;
        }
        if let Some((key, _)) = line.split_once('=') {
            let key = key.trim().trim_matches('"');
            let full = if table.is_empty() {
                key.to_string()
            } else {
                format!("{table}.{key}")
            };
            if full == dotted {
                return Some(i + 1);
            }
        }
    }
    None
}

/// Dotted key of the assignment or header on line `line` (1-based).
fn key_at_line(text: &str, line: usize) -> Option<String> {
    let mut table = String::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.starts_with('[') {
            table = l
                .trim_start_matches('[')
                .split(']')
                .next()
                .unwrap_or("")
                .trim()
                .to_string();
            if i + 1 == line {
                return Some(table);
            }
            continue;
        }
        if i + 1 == line {
            let key = l.split_once('=')?.0.trim().trim_matches('"');
            return Some(if table.is_empty() {
                key.to_string()
            } else {
                format!("{table}.{key}")
            });
        }
    }
    None
}

fn backticked(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

fn syntax_error(text: &str, err: toml::de::Error) -> ConfigError {
    let message = err.message().trim().to_string();
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let at = line.and_then(|l| key_at_line(text, l));
    let key = match (backticked(&message), at) {
        // missing or unknown fields are reported against their table
        (Some(name), Some(at)) if message.contains("field") && !at.ends_with(name) => {
            format!("{at}.{name}")
        }
        (Some(name), Some(at)) if message.contains("duplicate") && !at.ends_with(name) => {
            format!("{at}.{name}")
        }
        (_, Some(at)) => at,
        (Some(name), None) => name.to_string(),
        (None, None) => "<document>".to_string(),
    };
    ConfigError {
        key,
        line,
        message,
    }
}

fn invalid(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    // fall back to the enclosing table when the key is defaulted
    let line = locate_key(text, key).or_else(|| {
        key.rsplit_once('.')
            .and_then(|(table, _)| locate_key(text, table))
    });
    ConfigError {
        key: key.to_string(),
        line,
        message: message.into(),
    }
}

fn from_domain(text: &str, err: Error) -> ConfigError {
    match err {
        Error::Parameter { name, reason } => invalid(text, &name, reason),
        other => invalid(text, "<document>", other.to_string()),
    }
}

fn padded(values: &[f64], n: usize, text: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
    if values.len() > n {
        return Err(invalid(
            text,
            key,
            format!("at most {n} coefficients allowed, got {}", values.len()),
        ));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(invalid(text, key, format!("coefficient {v} is not finite")));
    }
    let mut out = values.to_vec();
    out.resize(n, 0.0);
    Ok(out)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ValidatedConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| syntax_error(text, e))?;
    validate_config(text, config)
}

fn validate_config(text: &str, config: ExperimentConfig) -> Result<ValidatedConfig, ConfigError> {
    let model = &config.model;
    model.check().map_err(|e| from_domain(text, e))?;
    let n = model.n_modes;

    let noise = match &config.noise.q_eigenvalues {
        Some(q) if q.len() != n => {
            return Err(invalid(
                text,
                "noise.q_eigenvalues",
                format!("expected {n} entries, got {}", q.len()),
            ))
        }
        Some(q) => NoiseSpec::new(q.clone()),
        None if config.noise.trace == 0.0 => Ok(NoiseSpec::zero(n)),
        None => NoiseSpec::power_law(n, config.noise.decay, config.noise.trace),
    }
    .map_err(|e| match e {
        Error::Parameter { name, reason } => invalid(text, &format!("noise.{name}"), reason),
        other => from_domain(text, other),
    })?;
    let sigma = config
        .noise
        .sigma
        .expand(n, "noise.sigma")
        .map_err(|m| invalid(text, "noise.sigma", m))?;
    let noise_coeff = NoiseCoeffSpec {
        kind: config.noise.coeff,
        sigma,
    };
    noise_coeff.check(n).map_err(|e| from_domain(text, e))?;

    if let Some(r) = config.nonlinearity.radius {
        if !(r > 0.0) {
            return Err(invalid(text, "nonlinearity.radius", format!("must be positive, got {r}")));
        }
    }
    let z0 = padded(&config.initial.coeffs, n, text, "initial.coeffs")?;

    let control = match &config.control {
        None => None,
        Some(c) => {
            let gains = c
                .gains
                .expand(n, "control.gains")
                .map_err(|m| invalid(text, "control.gains", m))?;
            let phi = match &c.phi {
                None => None,
                Some(p) => Some(
                    p.expand(n, "control.phi")
                        .map_err(|m| invalid(text, "control.phi", m))?,
                ),
            };
            if !(c.error_power > 0.0) {
                return Err(invalid(text, "control.error_power", "must be positive"));
            }
            if c.n_quad < 8 {
                return Err(invalid(text, "control.n_quad", "at least 8 nodes are required"));
            }
            let setup = ControlSetup {
                gains,
                lambda: config.run.lambda_list.first().copied().unwrap_or(1.0),
                target_mean: padded(&c.target_mean, n, text, "control.target_mean")?,
                phi,
                weighted_kernel: c.weighted_kernel,
            };
            setup.check(n).map_err(|e| from_domain(text, e))?;
            Some(setup)
        }
    };

    let run = &config.run;
    if run.lambda_list.is_empty() || run.lambda_list.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(invalid(text, "run.lambda_list", "λ values must be positive and finite"));
    }
    if run.lambda_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid(text, "run.lambda_list", "λ values must be strictly decreasing"));
    }
    if run.n_samples < 2 {
        return Err(invalid(text, "run.n_samples", "at least two samples are required"));
    }
    let ml = &config.mlfun;
    if ml.a.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
        return Err(invalid(text, "mlfun.a", "orders must lie in (0, 1]"));
    }
    if ml.b.iter().any(|b| !(*b > 0.0)) {
        return Err(invalid(text, "mlfun.b", "must be positive"));
    }
    let b = &config.bounds;
    if !(b.t_min > 0.0 && b.t_max > b.t_min) {
        return Err(invalid(text, "bounds.t_min", "need 0 < t_min < t_max"));
    }
    if b.n_t < 3 {
        return Err(invalid(text, "bounds.n_t", "at least three times are required"));
    }
    if b.beta.iter().any(|x| !(*x >= 0.0 && *x <= model.alpha)) {
        return Err(invalid(text, "bounds.beta", "β must lie in [0, α]"));
    }
    if config.bdg.p_list.iter().any(|p| !(*p >= 2.0)) {
        return Err(invalid(text, "bdg.p_list", "moment orders must be at least 2"));
    }
    let s = &config.solve;
    if !(s.tol > 0.0) || s.max_iter == 0 || s.n_paths == 0 {
        return Err(invalid(text, "solve", "tol, max_iter and n_paths must be positive"));
    }

    let report = validate_params(model);
    Ok(ValidatedConfig {
        config,
        noise,
        noise_coeff,
        z0,
        control,
        report,
    })
}

/// Recovers the configuration embedded in an output header.
pub fn config_from_header(output: &str) -> Result<ValidatedConfig, ConfigError> {
    let text: String = output
        .lines()
        .filter_map(|l| l.strip_prefix(super::output::CONFIG_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect();
    parse_config(&text)
}
