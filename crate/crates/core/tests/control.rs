use fracns::control::{
    apply_lt, controllability_sweep, feedback_lipschitz_ratios, grammian_diag, require_bounded,
    resolvent_apply, simulate_controlled, ControlSetup, FeedbackTables,
};
use fracns::dynamics::{
    MildSystem, ModelParams, NoiseCoeffKind, NoiseCoeffSpec, NonlinearityKind, NonlinearitySpec,
    PicardOptions,
};
use fracns::spectral::{BasisKind, SpectralField};
use fracns::stochastic::NoiseSpec;
use fracns::Error;
use proptest::prelude::*;

fn params(eta: f64, n: usize, k: usize) -> ModelParams {
    ModelParams {
        eta,
        alpha: 1.8,
        beta: 0.2,
        p: 4.0,
        nu: 0.1,
        t_final: 1.0,
        n_modes: n,
        n_steps: k,
        basis: BasisKind::DirichletSine1d,
    }
}

fn linear(eta: f64, n: usize, k: usize) -> MildSystem {
    MildSystem::new(
        params(eta, n, k),
        NonlinearitySpec::zero(),
        NoiseSpec::zero(n),
        NoiseCoeffSpec::additive(vec![0.0; n]),
        true,
    )
    .unwrap()
}

fn saturated(n: usize, k: usize) -> MildSystem {
    MildSystem::new(
        params(0.9, n, k),
        NonlinearitySpec {
            kind: NonlinearityKind::Burgers1d,
            radius: Some(1.0),
        },
        NoiseSpec::default_for(n),
        NoiseCoeffSpec {
            kind: NoiseCoeffKind::SaturatingDiagonal,
            sigma: vec![0.3; n],
        },
        false,
    )
    .unwrap()
}

fn setup(gains: Vec<f64>, target: Vec<f64>) -> ControlSetup {
    ControlSetup {
        gains,
        lambda: 1.0,
        target_mean: target,
        phi: None,
        weighted_kernel: true,
    }
}

#[test]
fn grammian_without_relaxation() {
    // μ = 0: γ = c² ∫_0^T s^{η-1} Γ(η)^{-2} ds = c² T^η / (η Γ(η)²)
    for eta in [0.3, 0.6, 0.75, 0.9] {
        let g = grammian_diag(&[0.0], &[2.0], eta, 1.5, 64).unwrap();
        let gam = libm::tgamma(eta);
        let exact = 4.0 * 1.5f64.powf(eta) / (eta * gam * gam);
        assert!((g.gamma[0] / exact - 1.0).abs() < 1e-10, "eta {eta}");
    }
}

#[test]
fn zero_gain_is_uncontrollable() {
    let g = grammian_diag(&[1.0, 2.0], &[1.0, 0.0], 0.8, 1.0, 16).unwrap();
    assert_eq!(g.uncontrollable_modes(), vec![1]);
    let f = SpectralField::new(vec![1.0, 3.0]).unwrap();
    let r = resolvent_apply(&g, 0.5, &f).unwrap();
    assert!((r.coeffs()[0] - 1.0 / (0.5 + g.gamma[0])).abs() < 1e-14);
    assert!((r.coeffs()[1] - 6.0).abs() < 1e-14);
    assert!(resolvent_apply(&g, 0.0, &f).is_err());
}

#[test]
fn zero_discrepancy_gives_zero_error() {
    let sys = linear(0.8, 2, 32);
    let tables = FeedbackTables::new(&sys).unwrap();
    let gains = vec![1.0, 1.0];
    let g = grammian_diag(sys.basis().frac_eigenvalues(), &gains, 0.8, 1.0, 32).unwrap();
    let s = setup(gains, vec![0.0, 0.0]);
    let r = controllability_sweep(&sys, &tables, &g, &s, &[0.0, 0.0], &[1.0, 0.1], 2, 2.0, 0, &PicardOptions::deterministic())
        .unwrap();
    for row in &r.rows {
        assert_eq!(row.mean, 0.0);
        assert_eq!(row.stderr, 0.0);
        assert_eq!(row.samples, 1);
    }
}

#[test]
fn unbounded_systems_are_rejected() {
    let n = 4;
    let sys = MildSystem::new(
        params(0.9, n, 8),
        NonlinearitySpec {
            kind: NonlinearityKind::Burgers1d,
            radius: None,
        },
        NoiseSpec::zero(n),
        NoiseCoeffSpec::additive(vec![0.0; n]),
        false,
    )
    .unwrap();
    match require_bounded(&sys) {
        Err(Error::Parameter { name, .. }) => assert_eq!(name, "nonlinearity.radius"),
        other => panic!("{other:?}"),
    }
    assert!(require_bounded(&saturated(n, 8)).is_ok());
}

#[test]
fn setup_errors_name_the_key() {
    let s = ControlSetup {
        lambda: -1.0,
        ..setup(vec![1.0], vec![0.0])
    };
    match s.check(1) {
        Err(Error::Parameter { name, .. }) => assert!(name.starts_with("control.")),
        other => panic!("{other:?}"),
    }
    assert!(setup(vec![1.0], vec![0.0, 1.0]).check(1).is_err());
}

#[test]
fn open_loop_terminal_response() {
    let sys = linear(0.8, 2, 16);
    let values: Vec<f64> = (0..16).flat_map(|k| [1.0, k as f64]).collect();
    let lt = apply_lt(sys.kernels(), &[2.0, 0.5], &values).unwrap();
    let mut expected = [0.0; 2];
    for k in 0..16 {
        let w = sys.kernels().drift(16 - k);
        expected[0] += w[0] * 2.0;
        expected[1] += w[1] * 0.5 * k as f64;
    }
    assert!((lt[0] - expected[0]).abs() < 1e-14 && (lt[1] - expected[1]).abs() < 1e-14);
    assert!(apply_lt(sys.kernels(), &[2.0, 0.5], &values[1..]).is_err());
}

#[test]
fn feedback_lipschitz_scales_like_inverse_power() {
    let n = 4;
    let sys = saturated(n, 64);
    let tables = FeedbackTables::new(&sys).unwrap();
    let gains = vec![0.05; n];
    let g = grammian_diag(sys.basis().frac_eigenvalues(), &gains, 0.9, 1.0, 32).unwrap();
    let s = setup(gains, vec![0.3, 0.0, -0.2, 0.0]);
    let p = 2.0;
    let r = feedback_lipschitz_ratios(&sys, &tables, &g, &s, &[0.1, 0.0, 0.0, 0.0], &[1.0, 0.5, 0.25], p, 64, 3)
        .unwrap();
    assert!(r.ratio.iter().all(|x| *x > 0.0 && x.is_finite()));
    assert!(r.ratio.windows(2).all(|w| w[1] > w[0]));
    assert!(-r.exponent >= p / 2.0 && -r.exponent <= 2.0 * p, "exponent {}", r.exponent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scalar_closed_loop_law(lambda in 0.01f64..2.0, eta in 0.6f64..0.95, d in -2.0f64..2.0) {
        let sys = linear(eta, 1, 64);
        let tables = FeedbackTables::new(&sys).unwrap();
        let g = grammian_diag(sys.basis().frac_eigenvalues(), &[1.0], eta, 1.0, 64).unwrap();
        let s = ControlSetup { lambda, ..setup(vec![1.0], vec![d]) };
        let run = simulate_controlled(&sys, &tables, &g, &s, &[0.0], 0, 0, &PicardOptions::deterministic()).unwrap();
        let expected = lambda / (lambda + g.gamma[0]) * d.abs();
        prop_assert!((run.error - expected).abs() <= 1e-7 * expected.max(1e-12), "{} vs {}", run.error, expected);
    }
}
