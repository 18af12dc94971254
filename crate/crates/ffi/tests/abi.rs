use std::ffi::{CStr, CString};
use std::ptr;

use fracns_ffi::*;

fn last_error() -> String {
    let p = fracns_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    assert_eq!(unsafe { fracns_mittag_leffler(1.0, 1.0, 1.0, &mut v) }, FracnsStatus::Ok);
    assert!((v - std::f64::consts::E).abs() < 1e-15);
    assert!(fracns_last_error().is_null());
    assert_eq!(unsafe { fracns_mainardi(0.5, 0.0, &mut v) }, FracnsStatus::Ok);
    assert!((v - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);

    assert_eq!(
        unsafe { fracns_mittag_leffler(1.5, 1.0, 1.0, &mut v) },
        FracnsStatus::InvalidParameter
    );
    assert!(last_error().contains('a'));
    assert_eq!(unsafe { fracns_mainardi(0.5, -1.0, &mut v) }, FracnsStatus::Domain);
    assert_eq!(
        unsafe { fracns_mittag_leffler(1.0, 1.0, 1.0, ptr::null_mut()) },
        FracnsStatus::NullPointer
    );
}

#[test]
fn basis_handle() {
    let mut b = ptr::null_mut();
    let st = unsafe { fracns_basis_new(FracnsBasisKind::DirichletSine1d, 3, 1.0, 2.0, &mut b) };
    assert_eq!(st, FracnsStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { fracns_basis_len(b, &mut n) }, FracnsStatus::Ok);
    assert_eq!(n, 3);
    let mut ev = [0.0; 3];
    assert_eq!(unsafe { fracns_basis_eigenvalues(b, ev.as_mut_ptr(), 3) }, FracnsStatus::Ok);
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((ev[2] - 9.0 * pi2).abs() < 1e-12);
    assert_eq!(
        unsafe { fracns_basis_eigenvalues(b, ev.as_mut_ptr(), 2) },
        FracnsStatus::BufferTooSmall
    );
    // η = 1, α = 2: M(t) is the heat semigroup
    let input = [1.0, 0.0, 2.0];
    let mut out = [0.0; 3];
    let st = unsafe { fracns_basis_apply_m_eta(b, 0.1, 1.0, input.as_ptr(), out.as_mut_ptr(), 3) };
    assert_eq!(st, FracnsStatus::Ok);
    assert!((out[0] - (-0.1 * pi2).exp()).abs() < 1e-14);
    assert!((out[2] - 2.0 * (-0.9 * pi2).exp()).abs() < 1e-14);
    unsafe { fracns_basis_free(b) };

    let mut bad = ptr::null_mut();
    let st = unsafe { fracns_basis_new(FracnsBasisKind::DirichletSine1d, 0, 1.0, 2.0, &mut bad) };
    assert_eq!(st, FracnsStatus::InvalidParameter);
    assert!(bad.is_null());
}

#[test]
fn validation_conditions() {
    let mut values = [0.0; 6];
    let mut passed = [false; 6];
    let st = unsafe { fracns_validate(0.5, 1.8, 0.2, 2.0, values.as_mut_ptr(), passed.as_mut_ptr()) };
    assert_eq!(st, FracnsStatus::Ok);
    assert!(passed[0] && !passed[1]);
    assert_eq!(values[1], 1.0);
}

const CONFIG: &str = "[model]
eta = 0.9
alpha = 1.8
beta = 0.2
p = 4.0
nu = 1.0
t_final = 1.0
n_modes = 4
n_steps = 8
basis = \"dirichlet_sine1d\"
";

#[test]
fn config_and_run() {
    let text = CString::new(CONFIG).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fracns_config_parse(text.as_ptr(), &mut cfg) }, FracnsStatus::Ok);
    let mut buf = [0 as std::ffi::c_char; 65];
    assert_eq!(unsafe { fracns_config_hash(cfg, buf.as_mut_ptr(), 65) }, FracnsStatus::Ok);
    let hash = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert_eq!(
        unsafe { fracns_config_hash(cfg, buf.as_mut_ptr(), 64) },
        FracnsStatus::BufferTooSmall
    );

    let dir = tempfile_dir();
    let out = CString::new(dir.clone()).unwrap();
    let st = unsafe { fracns_run(cfg, FracnsSubcommand::Validate, false, out.as_ptr()) };
    assert_eq!(st, FracnsStatus::Ok);
    let csv = std::fs::read_to_string(format!("{dir}/validate.csv")).unwrap();
    assert!(csv.contains(&hash));
    unsafe { fracns_config_free(cfg) };
    std::fs::remove_dir_all(dir).unwrap();

    let bad = CString::new(CONFIG.replace("eta = 0.9", "eta = 1.5")).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fracns_config_parse(bad.as_ptr(), &mut cfg) }, FracnsStatus::Config);
    assert!(last_error().contains("model.eta"));
}

fn tempfile_dir() -> String {
    let dir = std::env::temp_dir().join(format!("fracns-ffi-{}", std::process::id()));
    dir.to_string_lossy().into_owned()
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fracns.h");
    let src = std::env::temp_dir().join(format!("fracns-header-{}.c", std::process::id()));
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ double v; return fracns_mittag_leffler(1.0, 1.0, 0.0, &v) != FRACNS_STATUS_OK; }}\n"
        ),
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status();
    std::fs::remove_file(&src).ok();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler available; header check skipped"),
    }
}
