use std::path::Path;
use std::process::Command;

use fracns::cli::{
    config_from_header, exit_code, parse_config, run, write_outcome, ExitStatus, Subcommand,
    CONFIG_PREFIX,
};
use fracns::Error;
use proptest::prelude::*;

const BASE: &str = "[model]
eta = 0.9
alpha = 1.8
beta = 0.2
p = 4.0
nu = 1.0
t_final = 1.0
n_modes = 4
n_steps = 16
basis = \"dirichlet_sine1d\"
";

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn fracns(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fracns")).args(args).output().unwrap()
}

#[test]
fn header_round_trip() {
    let cfg = parse_config(&format!("{BASE}\n[run]\nseed = 17\n")).unwrap();
    let out = run(Subcommand::Validate, &cfg, false).unwrap();
    for (_, text) in out.rendered() {
        assert!(text.lines().any(|l| l.starts_with(CONFIG_PREFIX)));
        let back = config_from_header(&text).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(back.config.run.seed, 17);
    }
}

#[test]
fn mlfun_exponential_row() {
    let cfg = parse_config(&format!("{BASE}\n[mlfun]\na = [1.0]\nb = [1.0]\nx = [1.0]\n")).unwrap();
    let out = run(Subcommand::Mlfun, &cfg, false).unwrap();
    assert!(out.passed);
    let t = out.table("mlfun").unwrap();
    let value = t.column("value").unwrap()[0];
    assert_eq!(format!("{value:.6}"), "2.718282");
    assert!(t.column("abs_diff").unwrap()[0] <= 1e-10);
}

#[test]
fn csv_body_parses() {
    let cfg = parse_config(BASE).unwrap();
    let out = run(Subcommand::Bounds, &cfg, false).unwrap();
    for (_, text) in out.rendered() {
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        let width = body[0].split(',').count();
        for row in &body[1..] {
            let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cells.len(), width);
        }
    }
}

#[test]
fn error_statuses() {
    assert_eq!(exit_code(&Error::Refused("c1".into())), ExitStatus::Refused);
    assert_eq!(exit_code(&Error::Parameter {
            name: "x".into(),
            reason: "bad".into()
        }), ExitStatus::Usage);
    assert_eq!(
        exit_code(&Error::Io {
            path: "p".into(),
            message: "m".into()
        }),
        ExitStatus::Io
    );
    assert_eq!(exit_code(&Error::BlowUp { step: 1, norm: 1e13 }), ExitStatus::Computation);
}

#[test]
fn outputs_are_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(BASE).unwrap();
    let out = run(Subcommand::Validate, &cfg, false).unwrap();
    let paths = write_outcome(&out, &dir.path().join("nested")).unwrap();
    assert!(!paths.is_empty());
    let names: Vec<_> = std::fs::read_dir(dir.path().join("nested"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().all(|n| n.ends_with(".csv")), "{names:?}");
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let good = write(dir.path(), "good.toml", BASE);
    let r = fracns(&["validate", "--config", good.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(Path::new(out).join("validate.csv").exists());

    let bad = write(dir.path(), "bad.toml", &BASE.replace("eta = 0.9", "eta = 1.5"));
    let r = fracns(&["validate", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("model.eta") && err.contains("line 2"), "{err}");

    let critical = BASE.replace("eta = 0.9", "eta = 0.5").replace("p = 4.0", "p = 2.0");
    let critical = write(dir.path(), "critical.toml", &critical);
    let r = fracns(&["solve", "--config", critical.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(3));
    let r = fracns(&[
        "solve",
        "--config",
        critical.to_str().unwrap(),
        "--out",
        out,
        "--override-validation",
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));

    let r = fracns(&["validate", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(5));
    let r = fracns(&["frobnicate", "--config", good.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{BASE}\n[noise]\ntrace = 1.0\n"));
    let out = dir.path().join("o");
    let r = fracns(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(out.join("solve_norms.csv")).unwrap();
    assert!(text.contains("# seed: 99"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_form_is_a_fixed_point(eta in 0.55f64..0.99, nu in 0.01f64..10.0, seed in 0u64..=i64::MAX as u64) {
        let text = BASE
            .replace("eta = 0.9", &format!("eta = {eta}"))
            .replace("nu = 1.0", &format!("nu = {nu}"));
        let cfg = parse_config(&format!("{text}\n[run]\nseed = {seed}\n")).unwrap();
        let again = parse_config(&cfg.canonical()).unwrap();
        prop_assert_eq!(cfg.canonical(), again.canonical());
        prop_assert_eq!(cfg.hash(), again.hash());
        prop_assert_eq!(again.config.model.eta, eta);
    }
}
