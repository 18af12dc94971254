//! C ABI over `fracns`.
//!
//! Every function returns a [`FracnsStatus`]; results go through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`fracns_last_error`]. Handles are opaque and must be released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fracns::cli::{self, Subcommand, ValidatedConfig};
use fracns::dynamics::{validate_params, ModelParams};
use fracns::spectral::{Basis, BasisKind, SpectralField};
use fracns::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracnsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Numerical = 4,
    NonConvergence = 5,
    Refused = 6,
    Config = 7,
    Io = 8,
    InvalidUtf8 = 9,
    BufferTooSmall = 10,
    ChecksFailed = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracnsBasisKind {
    DirichletSine1d = 0,
    DivfreeTorus2d = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracnsSubcommand {
    Validate = 0,
    Mlfun = 1,
    Bounds = 2,
    Bdg = 3,
    Solve = 4,
    ControlSweep = 5,
}

/// Opaque eigenbasis handle.
pub struct FracnsBasis(Basis);

/// Opaque parsed configuration handle.
pub struct FracnsConfig(ValidatedConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FracnsStatus {
    match err {
        Error::Parameter { .. } => FracnsStatus::InvalidParameter,
        Error::Domain { .. } => FracnsStatus::Domain,
        Error::Numerical { .. } | Error::BlowUp { .. } => FracnsStatus::Numerical,
        Error::NonConvergence { .. } => FracnsStatus::NonConvergence,
        Error::Refused(_) => FracnsStatus::Refused,
        Error::Config(_) => FracnsStatus::Config,
        Error::Io { .. } => FracnsStatus::Io,
        Error::Sample { source, .. } => status_of(source),
    }
}

fn fail(err: Error) -> FracnsStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn guard(f: impl FnOnce() -> FracnsStatus) -> FracnsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            FracnsStatus::Panic
        }
    }
}

fn null(what: &str) -> FracnsStatus {
    set_error(format!("{what} is null"));
    FracnsStatus::NullPointer
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, FracnsStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        FracnsStatus::InvalidUtf8
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fracns_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `E_{a,b}(x)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracns_mittag_leffler(a: f64, b: f64, x: f64, out: *mut f64) -> FracnsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match fracns::specfun::mittag_leffler(a, b, x) {
            Ok(v) => {
                *out = v;
                FracnsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Mainardi function `K_η(s)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracns_mainardi(eta: f64, s: f64, out: *mut f64) -> FracnsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match fracns::specfun::mainardi(eta, s) {
            Ok(v) => {
                *out = v;
                FracnsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Creates an eigenbasis with `n` modes.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracns_basis_new(
    kind: FracnsBasisKind,
    n: usize,
    nu: f64,
    alpha: f64,
    out: *mut *mut FracnsBasis,
) -> FracnsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let kind = match kind {
            FracnsBasisKind::DirichletSine1d => BasisKind::DirichletSine1d,
            FracnsBasisKind::DivfreeTorus2d => BasisKind::DivfreeTorus2d,
        };
        match Basis::new(kind, n, nu, alpha) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(FracnsBasis(b)));
                FracnsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `basis` must be null or a handle from [`fracns_basis_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracns_basis_free(basis: *mut FracnsBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// # Safety
/// `basis` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracns_basis_len(basis: *const FracnsBasis, out: *mut usize) -> FracnsStatus {
    guard(|| {
        if basis.is_null() || out.is_null() {
            return null("basis or out");
        }
        *out = (*basis).0.len();
        FracnsStatus::Ok
    })
}

/// Copies the Laplacian eigenvalues into `out[0..len]`.
///
/// # Safety
/// `basis` must be a live handle; `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fracns_basis_eigenvalues(
    basis: *const FracnsBasis,
    out: *mut f64,
    len: usize,
) -> FracnsStatus {
    guard(|| {
        if basis.is_null() || out.is_null() {
            return null("basis or out");
        }
        let ev = (*basis).0.eigenvalues();
        if len < ev.len() {
            set_error(format!("buffer holds {len} values, {} needed", ev.len()));
            return FracnsStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(ev.as_ptr(), out, ev.len());
        FracnsStatus::Ok
    })
}

/// `out = M_η(t) input`, both of length `len` equal to the basis size.
///
/// # Safety
/// `basis` must be a live handle; `input` valid for `len` reads and `out`
/// for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fracns_basis_apply_m_eta(
    basis: *const FracnsBasis,
    t: f64,
    eta: f64,
    input: *const f64,
    out: *mut f64,
    len: usize,
) -> FracnsStatus {
    guard(|| {
        if basis.is_null() || input.is_null() || out.is_null() {
            return null("basis, input or out");
        }
        let b = &(*basis).0;
        if len != b.len() {
            return fail(Error::Parameter {
                name: "len".into(),
                reason: format!("basis has {} modes, got {len}", b.len()),
            });
        }
        let field = match SpectralField::new(std::slice::from_raw_parts(input, len).to_vec()) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        match b.apply_m_eta(t, &field, eta) {
            Ok(r) => {
                ptr::copy_nonoverlapping(r.coeffs().as_ptr(), out, len);
                FracnsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Evaluates the six exponent conditions `c0..c5`. `values` and `passed`
/// receive six entries each.
///
/// # Safety
/// `values` and `passed` must be valid for six writes.
#[no_mangle]
pub unsafe extern "C" fn fracns_validate(
    eta: f64,
    alpha: f64,
    beta: f64,
    p: f64,
    values: *mut f64,
    passed: *mut bool,
) -> FracnsStatus {
    guard(|| {
        if values.is_null() || passed.is_null() {
            return null("values or passed");
        }
        let mp = ModelParams {
            eta,
            alpha,
            beta,
            p,
            nu: 1.0,
            t_final: 1.0,
            n_modes: 1,
            n_steps: 1,
            basis: BasisKind::DirichletSine1d,
        };
        let report = validate_params(&mp);
        for (i, c) in report.conditions.iter().enumerate() {
            *values.add(i) = c.value;
            *passed.add(i) = c.passed;
        }
        FracnsStatus::Ok
    })
}

/// Parses a TOML experiment configuration.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fracns_config_parse(text: *const c_char, out: *mut *mut FracnsConfig) -> FracnsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse_config(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(FracnsConfig(c)));
                FracnsStatus::Ok
            }
            Err(e) => fail(Error::Config(e)),
        }
    })
}

/// # Safety
/// `config` must be null or a handle from [`fracns_config_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracns_config_free(config: *mut FracnsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Writes the hex SHA-256 of the canonical configuration (64 characters
/// plus NUL) into `buf`.
///
/// # Safety
/// `config` must be a live handle; `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fracns_config_hash(
    config: *const FracnsConfig,
    buf: *mut c_char,
    len: usize,
) -> FracnsStatus {
    guard(|| {
        if config.is_null() || buf.is_null() {
            return null("config or buf");
        }
        let hash = (*config).0.hash();
        if len < hash.len() + 1 {
            set_error(format!("buffer holds {len} bytes, {} needed", hash.len() + 1));
            return FracnsStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast::<c_char>(), buf, hash.len());
        *buf.add(hash.len()) = 0;
        FracnsStatus::Ok
    })
}

/// Runs a subcommand and writes its tables into `out_dir`. Returns
/// `CHECKS_FAILED` when the run completed but a check did not pass.
///
/// # Safety
/// `config` must be a live handle and `out_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn fracns_run(
    config: *const FracnsConfig,
    subcommand: FracnsSubcommand,
    override_validation: bool,
    out_dir: *const c_char,
) -> FracnsStatus {
    guard(|| {
        if config.is_null() {
            return null("config");
        }
        let dir = match read_str(out_dir, "out_dir") {
            Ok(d) => d,
            Err(s) => return s,
        };
        let sub = match subcommand {
            FracnsSubcommand::Validate => Subcommand::Validate,
            FracnsSubcommand::Mlfun => Subcommand::Mlfun,
            FracnsSubcommand::Bounds => Subcommand::Bounds,
            FracnsSubcommand::Bdg => Subcommand::Bdg,
            FracnsSubcommand::Solve => Subcommand::Solve,
            FracnsSubcommand::ControlSweep => Subcommand::ControlSweep,
        };
        let outcome = match cli::run(sub, &(*config).0, override_validation) {
            Ok(o) => o,
            Err(e) => return fail(e),
        };
        if let Err(e) = cli::write_outcome(&outcome, Path::new(dir)) {
            return fail(e);
        }
        if outcome.passed {
            FracnsStatus::Ok
        } else {
            set_error(format!("{} checks failed", sub.name()));
            FracnsStatus::ChecksFailed
        }
    })
}
