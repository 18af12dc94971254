use std::f64::consts::{PI, SQRT_2};

use fracns::dynamics::{
    subinterval_weights, validate_params, MildSystem, ModelParams, NoControl, NoiseCoeffKind,
    NoiseCoeffSpec, Nonlinearity, NonlinearityKind, NonlinearitySpec, OpenLoop, PicardOptions,
};
use fracns::specfun::mittag_leffler;
use fracns::spectral::{Basis, BasisKind};
use fracns::stochastic::{NoiseSpec, TimeGrid};
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

fn burgers(radius: Option<f64>) -> NonlinearitySpec {
    NonlinearitySpec {
        kind: NonlinearityKind::Burgers1d,
        radius,
    }
}

/// Galerkin coefficients of `-u u_x` by triad summation.
fn triads(z: &[f64]) -> Vec<f64> {
    let n = z.len() as i64;
    (1..=n)
        .map(|k| {
            let mut s = 0.0;
            for m in 1..=n {
                for q in 1..=n {
                    let w = if (m - q).abs() == k {
                        1.0
                    } else if m + q == k {
                        -1.0
                    } else {
                        0.0
                    };
                    s += w * z[(m - 1) as usize] * z[(q - 1) as usize];
                }
            }
            SQRT_2 * k as f64 * PI / 4.0 * s
        })
        .collect()
}

#[test]
fn single_sine_product() {
    let basis = Basis::new(BasisKind::DirichletSine1d, 6, 1.0, 2.0).unwrap();
    let nl = Nonlinearity::new(burgers(None), &basis).unwrap();
    let mut z = vec![0.0; 6];
    z[0] = 1.0;
    let g = nl.apply(&z);
    assert!((g[1] + PI / SQRT_2).abs() < 1e-13);
    assert_eq!(nl.apply(&[0.0; 6]), vec![0.0; 6]);
}

#[test]
fn basis_mismatch_is_rejected() {
    let basis = Basis::new(BasisKind::DirichletSine1d, 6, 1.0, 2.0).unwrap();
    let spec = NonlinearitySpec {
        kind: NonlinearityKind::NavierStokes2d,
        radius: None,
    };
    assert!(matches!(Nonlinearity::new(spec, &basis), Err(Error::Parameter { .. })));
}

#[test]
fn homogeneous_single_mode_is_exact() {
    let sys = MildSystem::new(
        params(0.7, 1, 32),
        NonlinearitySpec::zero(),
        NoiseSpec::zero(1),
        NoiseCoeffSpec::additive(vec![0.0]),
        true,
    )
    .unwrap();
    let r = sys
        .picard_solve(&[2.0], &sys.zero_noise(), &NoControl, &PicardOptions::deterministic())
        .unwrap();
    let mu = sys.basis().frac_eigenvalues()[0];
    for (i, t) in sys.grid().times().iter().enumerate() {
        let e = 2.0 * mittag_leffler(0.7, 1.0, -mu * t.powf(0.7)).unwrap();
        assert!((r.state(i)[0] - e).abs() < 1e-14);
    }
}

#[test]
fn classical_limit_with_constant_forcing() {
    // z' = -μ z + c v, z(0) = z0: z(t) = e^{-μt} z0 + (1 - e^{-μt}) c v / μ
    let mut p = params(1.0, 2, 40);
    p.alpha = 2.0;
    let sys = MildSystem::new(
        p,
        NonlinearitySpec::zero(),
        NoiseSpec::zero(2),
        NoiseCoeffSpec::additive(vec![0.0; 2]),
        true,
    )
    .unwrap();
    let (c, v) = ([0.5, 2.0], [1.5, -0.25]);
    let values: Vec<f64> = (0..40).flat_map(|_| v).collect();
    let control = OpenLoop::new(c.to_vec(), values).unwrap();
    let z0 = [0.3, -0.1];
    let path = sys.march(&z0, &sys.zero_noise(), &control).unwrap();
    for (i, t) in sys.grid().times().iter().enumerate() {
        for m in 0..2 {
            let mu = sys.basis().frac_eigenvalues()[m];
            let e = (-mu * t).exp();
            let exact = e * z0[m] + (1.0 - e) * c[m] * v[m] / mu;
            assert!((path[i * 2 + m] - exact).abs() < 1e-10, "t={t} m={m}");
        }
    }
}

#[test]
fn refusal_without_override() {
    let mut p = params(0.5, 2, 8);
    p.p = 2.0;
    let build = |o| {
        MildSystem::new(
            p.clone(),
            NonlinearitySpec::zero(),
            NoiseSpec::zero(2),
            NoiseCoeffSpec::additive(vec![0.0; 2]),
            o,
        )
    };
    match build(false) {
        Err(Error::Refused(msg)) => assert!(msg.contains("c1")),
        other => panic!("{other:?}"),
    }
    assert!(build(true).is_ok());
}

#[test]
fn noise_coefficient_lipschitz() {
    let noise = NoiseSpec::default_for(4);
    let add = NoiseCoeffSpec::additive(vec![0.3; 4]);
    assert_eq!(add.empirical_lipschitz(&noise, 1000, 1), 0.0);
    let sat = NoiseCoeffSpec {
        kind: NoiseCoeffKind::SaturatingDiagonal,
        sigma: vec![0.2, 0.5, 0.1, 0.4],
    };
    let bound = sat
        .sigma
        .iter()
        .zip(noise.q_eigenvalues())
        .map(|(s, q)| s * q.sqrt())
        .fold(0.0, f64::max);
    assert!(sat.empirical_lipschitz(&noise, 1000, 1) <= bound * (1.0 + 1e-12));
    let far = sat.multiplier(0.0, &[50.0, -50.0, 50.0, 50.0]);
    assert!((far[1] + 0.5).abs() < 1e-12);
}

#[test]
fn blowup_is_reported() {
    let mut p = params(0.9, 8, 64);
    p.nu = 1e-4;
    let sys = MildSystem::new(
        p,
        burgers(None),
        NoiseSpec::zero(8),
        NoiseCoeffSpec::additive(vec![0.0; 8]),
        false,
    )
    .unwrap();
    let z0 = vec![1e3; 8];
    let r = sys.march(&z0, &sys.zero_noise(), &NoControl);
    assert!(matches!(r, Err(Error::BlowUp { .. })), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn burgers_is_the_galerkin_projection(z in prop::collection::vec(-1.0f64..1.0, 8)) {
        let basis = Basis::new(BasisKind::DirichletSine1d, 8, 1.0, 2.0).unwrap();
        let nl = Nonlinearity::new(burgers(None), &basis).unwrap();
        let g = nl.apply(&z);
        for (a, b) in g.iter().zip(triads(&z)) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
        // quadratic scaling and energy neutrality
        let z2: Vec<f64> = z.iter().map(|u| 2.0 * u).collect();
        for (a, b) in nl.apply(&z2).iter().zip(&g) {
            prop_assert!((a - 4.0 * b).abs() < 1e-12);
        }
        let energy: f64 = g.iter().zip(&z).map(|(a, b)| a * b).sum();
        prop_assert!(energy.abs() < 1e-12);
    }

    #[test]
    fn navier_stokes_conserves_energy(z in prop::collection::vec(-1.0f64..1.0, 12)) {
        let basis = Basis::new(BasisKind::DivfreeTorus2d, 12, 1.0, 2.0).unwrap();
        let spec = NonlinearitySpec { kind: NonlinearityKind::NavierStokes2d, radius: None };
        let g = Nonlinearity::new(spec, &basis).unwrap().apply(&z);
        let energy: f64 = g.iter().zip(&z).map(|(a, b)| a * b).sum();
        prop_assert!(energy.abs() < 1e-10, "{}", energy);
    }

    #[test]
    fn saturation_caps_the_drift(z in prop::collection::vec(-3.0f64..3.0, 6), r in 0.1f64..2.0) {
        let basis = Basis::new(BasisKind::DirichletSine1d, 6, 1.0, 2.0).unwrap();
        let g = Nonlinearity::new(burgers(None), &basis).unwrap().apply(&z);
        let s = Nonlinearity::new(burgers(Some(r)), &basis).unwrap().apply(&z);
        let norm2: f64 = z.iter().map(|u| u * u).sum();
        let factor = (r * r / norm2).min(1.0);
        for (a, b) in s.iter().zip(&g) {
            prop_assert!((a - factor * b).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_telescope(eta in 0.1f64..1.0, t in 0.01f64..1.0, k in 1usize..64) {
        let grid = TimeGrid::uniform(1.0, k).unwrap();
        let s: f64 = subinterval_weights(&grid, eta, t).iter().sum();
        prop_assert!((s - t.powf(eta) / eta).abs() < 1e-12);
    }

    #[test]
    fn march_is_the_picard_fixed_point(amp in -0.3f64..0.3, seed in 0u64..50) {
        let n = 6;
        let sys = MildSystem::new(
            params(0.9, n, 48),
            burgers(Some(1.0)),
            NoiseSpec::default_for(n),
            NoiseCoeffSpec { kind: NoiseCoeffKind::SaturatingDiagonal, sigma: vec![0.3; n] },
            false,
        ).unwrap();
        let mut z0 = vec![0.0; n];
        z0[0] = amp;
        z0[2] = -amp / 2.0;
        let dw = sys.sample_noise(seed, 0);
        let marched = sys.march(&z0, &dw, &NoControl).unwrap();
        let again = sys.evaluate_f_lambda(&z0, &marched, &dw, &NoControl).unwrap();
        for (a, b) in marched.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let opts = PicardOptions { tol: 1e-13, max_iter: 200, ..PicardOptions::deterministic() };
        let solved = sys.picard_solve(&z0, &dw, &NoControl, &opts).unwrap();
        for (a, b) in marched.iter().zip(solved.path()) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn c1_fails_exactly_on_the_critical_line(eta in 0.05f64..0.99, p in 1.1f64..12.0) {
        let mut mp = params(eta, 2, 4);
        mp.p = p;
        let r = validate_params(&mp);
        prop_assert!(r.get("c1").unwrap().passed);
        mp.p = 1.0 / eta;
        prop_assert!(!validate_params(&mp).get("c1").unwrap().passed);
        prop_assert_eq!(r.all_passed(), r.failed().count() == 0);
    }
}
