mod common;

use bae::sampler::update_adaptive;
use bae::{
    gibbs_sweep_bae, gibbs_sweep_bagl, gibbs_sweep_bagr, init_state, update_adaptive_bae, PriorSpec, RngStream,
    SymmetricMatrix,
};
use common::{gamma_cdf, ks_critical_001, ks_statistic};

const DRAWS: usize = 20_000;

fn fixed_state(w: f64, prior: &PriorSpec) -> bae::SamplerState {
    let mut state = init_state(2, prior).unwrap();
    state
        .set_omega(SymmetricMatrix::from_rows(&[vec![2.0, w], vec![w, 2.0]]).unwrap())
        .unwrap();
    state
}

#[test]
fn bae_adaptive_updates_match_gamma_conditionals() {
    let prior = PriorSpec::bae_default();
    let PriorSpec::Bae { r_tau, s_lambda, .. } = prior else { unreachable!() };
    for &w in &[0.0, -0.4, 1.3] {
        let mut state = fixed_state(w, &prior);
        let mut rng = RngStream::new(21);
        let (mut lambdas, mut taus) = (Vec::with_capacity(DRAWS), Vec::with_capacity(DRAWS));
        for _ in 0..DRAWS {
            update_adaptive_bae(&mut state, &prior, &mut rng).unwrap();
            lambdas.push(state.lambda.get(0, 1));
            taus.push(state.tau.get(0, 1));
        }
        let crit = ks_critical_001(DRAWS);
        let d = ks_statistic(lambdas, |x| gamma_cdf(1.0, w.abs() + s_lambda, x));
        assert!(d < crit, "lambda | w = {w}: D = {d}");
        let d = ks_statistic(taus, |x| gamma_cdf(1.5, 0.5 * w * w + r_tau, x));
        assert!(d < crit, "tau | w = {w}: D = {d}");
    }
}

#[test]
fn bagl_and_bagr_adaptive_updates_match_gamma_conditionals() {
    // Shapes chosen so the closed-form CDFs apply: 1 + r = 1.5 and a + 1/2 = 1.
    let bagl = PriorSpec::Bagl { r: 0.5, s: 0.2, lambda_diag: 1.0 };
    let bagr = PriorSpec::Bagr { a: 0.5, b: 0.3 };
    let w = 0.7;
    let crit = ks_critical_001(DRAWS);

    let mut state = fixed_state(w, &bagl);
    let mut rng = RngStream::new(22);
    let xs: Vec<f64> = (0..DRAWS)
        .map(|_| {
            update_adaptive(&mut state, &bagl, &mut rng).unwrap();
            state.lambda.get(0, 1)
        })
        .collect();
    let d = ks_statistic(xs, |x| gamma_cdf(1.5, w + 0.2, x));
    assert!(d < crit, "BAGL lambda: D = {d}");

    let mut state = fixed_state(w, &bagr);
    let xs: Vec<f64> = (0..DRAWS)
        .map(|_| {
            update_adaptive(&mut state, &bagr, &mut rng).unwrap();
            state.tau.get(0, 1)
        })
        .collect();
    let d = ks_statistic(xs, |x| gamma_cdf(1.0, 0.5 * w * w + 0.3, x));
    assert!(d < crit, "BAGR tau: D = {d}");
}

#[test]
fn bae_update_rejects_other_priors() {
    let prior = PriorSpec::bagl_default();
    let mut state = fixed_state(0.1, &prior);
    assert!(update_adaptive_bae(&mut state, &prior, &mut RngStream::new(1)).is_err());
}

#[test]
fn sweeps_preserve_positive_definiteness_and_symmetry() {
    // Nearly collinear data: the scatter matrix is close to singular.
    let p = 6;
    let scatter = SymmetricMatrix::from_fn(p, |i, j| if i == j { 20.0 } else { 19.9 });
    for prior in [PriorSpec::bae_default(), PriorSpec::bagl_default(), PriorSpec::bagr_default()] {
        let mut state = init_state(p, &prior).unwrap();
        let mut rng = RngStream::new(23);
        for _ in 0..500 {
            match prior {
                PriorSpec::Bae { .. } => gibbs_sweep_bae(&mut state, &scatter, 20, &prior, &mut rng),
                PriorSpec::Bagl { .. } => gibbs_sweep_bagl(&mut state, &scatter, 20, &prior, &mut rng),
                PriorSpec::Bagr { .. } => gibbs_sweep_bagr(&mut state, &scatter, 20, &prior, &mut rng),
            }
            .unwrap();
            assert!(state.omega.min_eigenvalue() > 0.0, "{:?} lost PD", prior.kind());
            assert!(state.omega.as_slice().iter().all(|v| v.is_finite()));
            for i in 0..p {
                for j in 0..p {
                    assert_eq!(state.omega.get(i, j), state.omega.get(j, i));
                }
            }
        }
    }
}
