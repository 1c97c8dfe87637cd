//! Block Gibbs samplers for the BAE, BAGL and BAGR priors.
//!
//! All three share the column update: for each column `k` the off-diagonal
//! block `beta = omega_12` is drawn from `N(-C s_21, C)` with
//! `C^{-1} = a * Omega_11^{-1} + diag(d)`, and the Schur complement
//! `gamma = omega_22 - beta' Omega_11^{-1} beta` from `GA(n/2 + 1, a/2)`.
//! The priors differ in the diagonal rate `a - s_22` and the per-entry
//! prior precisions `d`:
//!
//! ```text
//! BAE   a = s_22 + lambda_diag + tau_diag   d_kj = 1/phi_kj + tau_kj
//! BAGL  a = s_22 + lambda_diag              d_kj = 1/phi_kj
//! BAGR  a = s_22 + 1                        d_kj = tau_kj
//! ```
//!
//! After the columns, each sweep refreshes the adaptive shrinkage
//! parameters from their conditionals given `Omega` and then redraws the
//! latent scales `phi` given `(Omega, lambda)`. Keeping `lambda` and `phi`
//! adjacent makes the pair an exact joint draw given `Omega`.
//!
//! `Omega^{-1}` is tracked alongside `Omega` so that `Omega_11^{-1}` costs
//! a rank-one downdate instead of a factorization; it is recomputed from
//! scratch at the end of every sweep, which doubles as the PD check.

use serde::{Deserialize, Serialize};

use crate::data::{scatter_matrix, DataMatrix};
use crate::dist::{sample_gamma, sample_inverse_gaussian, standard_normal};
use crate::error::{domain_check, Error, Result};
use crate::linalg::{
    backward_sub_transposed, cholesky_in_place, dot, forward_sub, invert_from_cholesky,
    SymmetricMatrix,
};
use crate::prior::{PriorKind, PriorSpec};
use crate::rng::RngStream;
use crate::summary::PosteriorSummary;
use crate::trace::{ChainTrace, TraceHeader};

/// Below this magnitude `|omega_ij|` the inverse-Gaussian mean is clamped.
pub const OMEGA_ZERO_GUARD: f64 = 1e-10;
/// Clamped inverse-Gaussian mean used when `|omega_ij| < OMEGA_ZERO_GUARD`.
pub const IG_MEAN_CAP: f64 = 1e10;
/// Upper bound on the initial adaptive lambda.
pub const LAMBDA_INIT_CAP: f64 = 10.0;
/// Diagonal rate constant of the ridge-type sampler.
pub const BAGR_DIAG_RATE: f64 = 1.0;

/// Current draw of one chain.
///
/// `phi`, `lambda` and `tau` use only their off-diagonal entries; the
/// diagonal is kept at zero. Which of them are live depends on the prior:
/// BAE uses all three, BAGL `phi` and `lambda`, BAGR only `tau` (as a
/// precision, `1 / sigma_ij^2`).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    pub omega: SymmetricMatrix,
    pub phi: SymmetricMatrix,
    pub lambda: SymmetricMatrix,
    pub tau: SymmetricMatrix,
    pub sweep_index: u64,
    sigma: SymmetricMatrix,
}

impl SamplerState {
    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Cached `omega^{-1}`.
    pub fn covariance(&self) -> &SymmetricMatrix {
        &self.sigma
    }

    /// Replaces `omega` (e.g. for a warm start), recomputing the cache.
    pub fn set_omega(&mut self, omega: SymmetricMatrix) -> Result<()> {
        if omega.dim() != self.dim() {
            return Err(Error::Shape("omega dimension differs from state".into()));
        }
        self.sigma = omega.inverse()?;
        self.omega = omega;
        Ok(())
    }
}

/// Identity `omega`, unit latent scales, unit `tau` and `lambda` at its
/// prior mean capped at [`LAMBDA_INIT_CAP`].
pub fn init_state(p: usize, prior: &PriorSpec) -> Result<SamplerState> {
    domain_check(p >= 2, || format!("need p >= 2, got {p}"))?;
    prior.validate()?;
    let lambda0 = match *prior {
        PriorSpec::Bae { s_lambda, .. } => (1.0 / s_lambda).min(LAMBDA_INIT_CAP),
        PriorSpec::Bagl { r, s, .. } => (r / s).min(LAMBDA_INIT_CAP),
        PriorSpec::Bagr { .. } => 1.0,
    };
    let off = |v: f64| SymmetricMatrix::from_fn(p, move |i, j| if i == j { 0.0 } else { v });
    Ok(SamplerState {
        omega: SymmetricMatrix::identity(p),
        sigma: SymmetricMatrix::identity(p),
        phi: off(1.0),
        lambda: off(lambda0),
        tau: off(1.0),
        sweep_index: 0,
    })
}

/// Scratch buffers for the column update, sized for `p - 1`.
#[derive(Debug, Clone)]
struct Workspace {
    others: Vec<usize>,
    omega11_inv: Vec<f64>,
    precision: Vec<f64>,
    mean: Vec<f64>,
    noise: Vec<f64>,
    w: Vec<f64>,
    full: Vec<f64>,
}

impl Workspace {
    fn new(p: usize) -> Self {
        let q = p - 1;
        Self {
            others: Vec::with_capacity(q),
            omega11_inv: vec![0.0; q * q],
            precision: vec![0.0; q * q],
            mean: vec![0.0; q],
            noise: vec![0.0; q],
            w: vec![0.0; q],
            full: vec![0.0; p * p],
        }
    }
}

/// One chain's fixed inputs plus reusable scratch space.
#[derive(Debug, Clone)]
pub struct GibbsSampler<'a> {
    scatter: &'a SymmetricMatrix,
    n: usize,
    prior: PriorSpec,
    ws: Workspace,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(scatter: &'a SymmetricMatrix, n: usize, prior: PriorSpec) -> Result<Self> {
        domain_check(n >= 1, || "sample size must be positive".into())?;
        domain_check(scatter.dim() >= 2, || format!("need p >= 2, got {}", scatter.dim()))?;
        prior.validate()?;
        Ok(Self {
            scatter,
            n,
            prior,
            ws: Workspace::new(scatter.dim()),
        })
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    /// One full iteration: all column updates, adaptive hyperparameters,
    /// then latent scales.
    pub fn sweep(&mut self, state: &mut SamplerState, rng: &mut RngStream) -> Result<()> {
        if state.dim() != self.scatter.dim() {
            return Err(Error::Shape(format!(
                "state has p={}, scatter has p={}",
                state.dim(),
                self.scatter.dim()
            )));
        }
        self.column_sweep(state, rng)?;
        update_adaptive(state, &self.prior, rng)?;
        update_latent_scales(state, &self.prior, rng)?;
        state.sweep_index += 1;
        Ok(())
    }

    fn column_sweep(&mut self, state: &mut SamplerState, rng: &mut RngStream) -> Result<()> {
        let p = state.dim();
        for k in 0..p {
            self.update_column(state, k, rng)?;
        }
        // Fresh inverse from scratch; this is also the PD assertion.
        let ws = &mut self.ws;
        ws.full.copy_from_slice(state.omega.as_slice());
        if !cholesky_in_place(&mut ws.full, p) {
            return Err(Error::NumericalDegeneracy { column: p - 1 });
        }
        let mut inv = vec![0.0; p * p];
        invert_from_cholesky(&ws.full, p, &mut inv);
        state.sigma = SymmetricMatrix::from_fn(p, |i, j| inv[i * p + j]);
        Ok(())
    }

    fn update_column(&mut self, state: &mut SamplerState, k: usize, rng: &mut RngStream) -> Result<()> {
        let p = state.dim();
        let q = p - 1;
        let s = self.scatter;
        let ws = &mut self.ws;
        ws.others.clear();
        ws.others.extend((0..p).filter(|&j| j != k));

        let (diag_rate, literal) = match self.prior {
            PriorSpec::Bae {
                lambda_diag,
                tau_diag,
                literal_block,
                ..
            } => (lambda_diag + tau_diag, literal_block),
            PriorSpec::Bagl { lambda_diag, .. } => (lambda_diag, false),
            PriorSpec::Bagr { .. } => (BAGR_DIAG_RATE, false),
        };
        let a = s.get(k, k) + diag_rate;

        // Omega_11^{-1} = Sigma_11 - sigma_12 sigma_21 / sigma_22.
        let sigma = &state.sigma;
        let s22 = sigma.get(k, k);
        for (ia, &ra) in ws.others.iter().enumerate() {
            let ska = sigma.get(ra, k);
            for (ib, &rb) in ws.others.iter().enumerate().skip(ia) {
                let v = sigma.get(ra, rb) - ska * sigma.get(rb, k) / s22;
                ws.omega11_inv[ia * q + ib] = v;
                ws.omega11_inv[ib * q + ia] = v;
            }
        }

        for (ia, &ra) in ws.others.iter().enumerate() {
            for (ib, &rb) in ws.others.iter().enumerate() {
                let block = if literal {
                    state.omega.get(ra, rb)
                } else {
                    ws.omega11_inv[ia * q + ib]
                };
                ws.precision[ia * q + ib] = a * block;
            }
            let d = match self.prior {
                PriorSpec::Bae { .. } => 1.0 / state.phi.get(ra, k) + state.tau.get(ra, k),
                PriorSpec::Bagl { .. } => 1.0 / state.phi.get(ra, k),
                PriorSpec::Bagr { .. } => state.tau.get(ra, k),
            };
            ws.precision[ia * q + ia] += d;
        }
        if !cholesky_in_place(&mut ws.precision, q) {
            return Err(Error::NumericalDegeneracy { column: k });
        }

        // mean = -C s_21, beta = mean + L^{-T} z.
        for (m, &r) in ws.mean.iter_mut().zip(&ws.others) {
            *m = -s.get(r, k);
        }
        forward_sub(&ws.precision, q, &mut ws.mean);
        backward_sub_transposed(&ws.precision, q, &mut ws.mean);
        for z in ws.noise.iter_mut() {
            *z = standard_normal(rng);
        }
        backward_sub_transposed(&ws.precision, q, &mut ws.noise);
        let beta: &mut Vec<f64> = &mut ws.mean;
        for (b, z) in beta.iter_mut().zip(&ws.noise) {
            *b += z;
        }

        let gamma = sample_gamma(self.n as f64 / 2.0 + 1.0, a / 2.0, rng)?;

        for ia in 0..q {
            ws.w[ia] = dot(&ws.omega11_inv[ia * q..(ia + 1) * q], beta);
        }
        let quad = dot(beta, &ws.w);
        let omega22 = gamma + quad;
        if !omega22.is_finite() {
            return Err(Error::NumericalDegeneracy { column: k });
        }

        for (ia, &ra) in ws.others.iter().enumerate() {
            state.omega.set(ra, k, beta[ia]);
        }
        state.omega.set(k, k, omega22);

        // Block inverse of the updated omega via its Schur complement gamma.
        let sigma = &mut state.sigma;
        for (ia, &ra) in ws.others.iter().enumerate() {
            let wa = ws.w[ia];
            for (ib, &rb) in ws.others.iter().enumerate().skip(ia) {
                sigma.set(ra, rb, ws.omega11_inv[ia * q + ib] + wa * ws.w[ib] / gamma);
            }
            sigma.set(ra, k, -wa / gamma);
        }
        sigma.set(k, k, 1.0 / gamma);
        Ok(())
    }
}

/// Redraws the adaptive shrinkage parameters given `omega`.
///
/// * BAE: `lambda_ij ~ GA(1, |w_ij| + s)`, `tau_ij ~ GA(3/2, w_ij^2/2 + r)`
/// * BAGL: `lambda_ij ~ GA(1 + r, |w_ij| + s)`
/// * BAGR: `tau_ij ~ GA(a + 1/2, w_ij^2/2 + b)` (precision form of the
///   inverse-gamma update on `sigma_ij^2`)
pub fn update_adaptive(state: &mut SamplerState, prior: &PriorSpec, rng: &mut RngStream) -> Result<()> {
    let p = state.dim();
    for i in 0..p {
        for j in i + 1..p {
            let w = state.omega.get(i, j);
            match *prior {
                PriorSpec::Bae { r_tau, s_lambda, .. } => {
                    let l = sample_gamma(1.0, w.abs() + s_lambda, rng)?;
                    let t = sample_gamma(1.5, 0.5 * w * w + r_tau, rng)?;
                    state.lambda.set(i, j, l);
                    state.tau.set(i, j, t);
                }
                PriorSpec::Bagl { r, s, .. } => {
                    let l = sample_gamma(1.0 + r, w.abs() + s, rng)?;
                    state.lambda.set(i, j, l);
                }
                PriorSpec::Bagr { a, b } => {
                    let t = sample_gamma(a + 0.5, 0.5 * w * w + b, rng)?;
                    state.tau.set(i, j, t);
                }
            }
        }
    }
    Ok(())
}

/// BAE adaptive update; see [`update_adaptive`].
pub fn update_adaptive_bae(state: &mut SamplerState, prior: &PriorSpec, rng: &mut RngStream) -> Result<()> {
    expect_kind(prior, PriorKind::Bae)?;
    update_adaptive(state, prior, rng)
}

/// `1/phi_ij ~ IG(sqrt(lambda_ij^2 / w_ij^2), lambda_ij^2)` for the two
/// lasso-type priors; BAGR carries no latent scales.
pub fn update_latent_scales(
    state: &mut SamplerState,
    prior: &PriorSpec,
    rng: &mut RngStream,
) -> Result<()> {
    if prior.kind() == PriorKind::Bagr {
        return Ok(());
    }
    let p = state.dim();
    for i in 0..p {
        for j in i + 1..p {
            let w = state.omega.get(i, j).abs();
            let l = state.lambda.get(i, j);
            let mu = if w < OMEGA_ZERO_GUARD {
                IG_MEAN_CAP
            } else {
                (l / w).min(f64::MAX)
            };
            let delta = sample_inverse_gaussian(mu, l * l, rng)?;
            state.phi.set(i, j, 1.0 / delta);
        }
    }
    Ok(())
}

fn expect_kind(prior: &PriorSpec, kind: PriorKind) -> Result<()> {
    domain_check(prior.kind() == kind, || {
        format!("expected a {kind} prior, got {}", prior.kind())
    })
}

fn sweep_with_kind(
    kind: PriorKind,
    state: &mut SamplerState,
    scatter: &SymmetricMatrix,
    n: usize,
    prior: &PriorSpec,
    rng: &mut RngStream,
) -> Result<()> {
    expect_kind(prior, kind)?;
    GibbsSampler::new(scatter, n, *prior)?.sweep(state, rng)
}

/// One BAE sweep (columns, adaptive `lambda`/`tau`, latent `phi`).
pub fn gibbs_sweep_bae(
    state: &mut SamplerState,
    scatter: &SymmetricMatrix,
    n: usize,
    prior: &PriorSpec,
    rng: &mut RngStream,
) -> Result<()> {
    sweep_with_kind(PriorKind::Bae, state, scatter, n, prior, rng)
}

/// One BAGL sweep (columns, adaptive `lambda`, latent `phi`).
pub fn gibbs_sweep_bagl(
    state: &mut SamplerState,
    scatter: &SymmetricMatrix,
    n: usize,
    prior: &PriorSpec,
    rng: &mut RngStream,
) -> Result<()> {
    sweep_with_kind(PriorKind::Bagl, state, scatter, n, prior, rng)
}

/// One BAGR sweep (columns, adaptive `tau`).
pub fn gibbs_sweep_bagr(
    state: &mut SamplerState,
    scatter: &SymmetricMatrix,
    n: usize,
    prior: &PriorSpec,
    rng: &mut RngStream,
) -> Result<()> {
    sweep_with_kind(PriorKind::Bagr, state, scatter, n, prior, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub samples: usize,
    pub thinning: usize,
    pub seed: u64,
    /// RNG stream id; chains sharing a seed must use distinct streams.
    #[serde(default)]
    pub stream: u64,
    pub prior: PriorSpec,
}

impl ChainConfig {
    /// Reduced-length chain used for interactive and benchmark runs.
    pub fn desk(prior: PriorSpec, seed: u64) -> Self {
        Self {
            burn_in: 2_000,
            samples: 4_000,
            thinning: 1,
            seed,
            stream: 0,
            prior,
        }
    }

    /// 5,000 burn-in sweeps followed by 10,000 retained.
    pub fn full_length(prior: PriorSpec, seed: u64) -> Self {
        Self {
            burn_in: 5_000,
            samples: 10_000,
            ..Self::desk(prior, seed)
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        domain_check(self.samples >= 1, || "samples must be >= 1".into())?;
        domain_check(self.thinning >= 1, || "thinning must be >= 1".into())?;
        self.prior.validate()
    }
}

/// Runs burn-in plus `samples * thinning` sweeps and summarizes the
/// retained draws.
pub fn run_chain(data: &DataMatrix, config: &ChainConfig) -> Result<(PosteriorSummary, ChainTrace)> {
    if data.cols() < 2 {
        return Err(Error::Data(format!("need p >= 2 variables, got {}", data.cols())));
    }
    let scatter = scatter_matrix(data)?;
    run_chain_on_scatter(&scatter, data.rows(), config)
}

/// [`run_chain`] from a precomputed scatter matrix of `n` observations.
pub fn run_chain_on_scatter(
    scatter: &SymmetricMatrix,
    n: usize,
    config: &ChainConfig,
) -> Result<(PosteriorSummary, ChainTrace)> {
    config.validate()?;
    domain_check(n >= 2, || format!("need n >= 2 observations, got {n}"))?;
    let p = scatter.dim();
    let mut state = init_state(p, &config.prior)?;
    let mut sampler = GibbsSampler::new(scatter, n, config.prior)?;
    let mut rng = RngStream::with_stream(config.seed, config.stream);

    for _ in 0..config.burn_in {
        sampler.sweep(&mut state, &mut rng)?;
    }
    let header = TraceHeader::new(p, n, config);
    let mut trace = ChainTrace::with_capacity(header, config.samples);
    for _ in 0..config.samples {
        for _ in 0..config.thinning {
            sampler.sweep(&mut state, &mut rng)?;
        }
        trace.push(state.sweep_index, &state.omega);
    }
    let summary = PosteriorSummary::from_trace(&trace)?;
    Ok((summary, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter_identity(p: usize, n: usize) -> SymmetricMatrix {
        SymmetricMatrix::identity(p).scaled(n as f64)
    }

    #[test]
    fn init_state_identity_and_invariants() {
        let s = init_state(3, &PriorSpec::bae_default()).unwrap();
        assert_eq!(s.omega, SymmetricMatrix::identity(3));
        assert_eq!(s.lambda.get(0, 1), 10.0);
        assert!(s.omega.is_positive_definite());
        for m in [&s.phi, &s.lambda, &s.tau] {
            for i in 0..3 {
                for j in 0..3 {
                    assert!(if i == j { m.get(i, j) == 0.0 } else { m.get(i, j) > 0.0 });
                }
            }
        }
        let s = init_state(2, &PriorSpec::bagl_default()).unwrap();
        assert_eq!(s.phi.get(0, 1), 1.0);
    }

    #[test]
    fn init_state_rejects_p1() {
        assert!(init_state(1, &PriorSpec::bae_default()).is_err());
    }

    #[test]
    fn sweep_rejects_wrong_kind() {
        let mut st = init_state(3, &PriorSpec::bagl_default()).unwrap();
        let s = scatter_identity(3, 10);
        let mut rng = RngStream::new(1);
        assert!(gibbs_sweep_bae(&mut st, &s, 10, &PriorSpec::bagl_default(), &mut rng).is_err());
        assert!(update_adaptive_bae(&mut st, &PriorSpec::bagl_default(), &mut rng).is_err());
    }

    #[test]
    fn sweeps_keep_covariance_cache_exact() {
        for prior in PriorKind::ALL.map(|k| k.default_spec()) {
            let s = SymmetricMatrix::from_fn(4, |i, j| if i == j { 40.0 } else { 8.0 / (1 + j - i) as f64 });
            let mut st = init_state(4, &prior).unwrap();
            let mut sampler = GibbsSampler::new(&s, 40, prior).unwrap();
            let mut rng = RngStream::new(5);
            for _ in 0..20 {
                sampler.sweep(&mut st, &mut rng).unwrap();
                let inv = st.omega.inverse().unwrap();
                let rel = inv.sub(st.covariance()).unwrap().max_abs() / inv.max_abs();
                assert!(rel < 1e-9, "{prior:?}: {rel}");
            }
        }
    }

    #[test]
    fn mid_sweep_cache_tracks_omega() {
        let s = scatter_identity(5, 30);
        let prior = PriorSpec::bae_default();
        let mut st = init_state(5, &prior).unwrap();
        let mut sampler = GibbsSampler::new(&s, 30, prior).unwrap();
        let mut rng = RngStream::new(2);
        for k in 0..5 {
            sampler.update_column(&mut st, k, &mut rng).unwrap();
            let inv = st.omega.inverse().unwrap();
            assert!(inv.sub(&st.sigma).unwrap().max_abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let s = scatter_identity(4, 50);
        for prior in PriorKind::ALL.map(|k| k.default_spec()) {
            let run = || {
                let mut st = init_state(4, &prior).unwrap();
                let mut rng = RngStream::new(42);
                for _ in 0..30 {
                    GibbsSampler::new(&s, 50, prior).unwrap().sweep(&mut st, &mut rng).unwrap();
                }
                st
            };
            assert_eq!(run(), run());
        }
    }

    #[test]
    fn single_sample_chain_summarizes_its_draw() {
        let data = DataMatrix::from_rows(&[
            vec![0.1, 1.0, -0.3],
            vec![0.7, -0.2, 0.4],
            vec![-1.2, 0.5, 0.9],
            vec![0.3, 0.3, -1.1],
        ])
        .unwrap();
        let cfg = ChainConfig {
            burn_in: 0,
            samples: 1,
            thinning: 1,
            seed: 3,
            stream: 0,
            prior: PriorSpec::bae_default(),
        };
        let (summary, trace) = run_chain(&data, &cfg).unwrap();
        let draw = trace.omega(0).unwrap();
        assert_eq!(summary.omega_mean, draw);
        assert_eq!(summary.omega_median, draw);
        assert_eq!(summary.n_retained, 1);
    }

    #[test]
    fn thinning_retains_every_kth() {
        let data = DataMatrix::from_rows(&[
            vec![0.1, 1.0],
            vec![0.7, -0.2],
            vec![-1.2, 0.5],
        ])
        .unwrap();
        let cfg = ChainConfig {
            burn_in: 3,
            samples: 4,
            thinning: 2,
            seed: 3,
            stream: 0,
            prior: PriorSpec::bagr_default(),
        };
        let (_, trace) = run_chain(&data, &cfg).unwrap();
        assert_eq!(trace.sweep_indices(), &[5, 7, 9, 11]);
    }

    #[test]
    fn literal_block_variant_runs_and_stays_pd() {
        let s = scatter_identity(4, 100);
        let prior = PriorSpec::Bae {
            r_tau: 0.5,
            s_lambda: 0.05,
            lambda_diag: 1.0,
            tau_diag: 1.0,
            literal_block: true,
        };
        let mut st = init_state(4, &prior).unwrap();
        let mut rng = RngStream::new(8);
        for _ in 0..100 {
            gibbs_sweep_bae(&mut st, &s, 100, &prior, &mut rng).unwrap();
            assert!(st.omega.is_positive_definite());
        }
    }

    #[test]
    fn adaptive_bae_conditional_means() {
        let prior = PriorSpec::bae_default();
        let mut st = init_state(2, &prior).unwrap();
        st.omega.set(0, 1, 0.0);
        let mut rng = RngStream::new(11);
        let (mut sl, mut st_) = (0.0, 0.0);
        let n = 100_000;
        for _ in 0..n {
            update_adaptive_bae(&mut st, &prior, &mut rng).unwrap();
            sl += st.lambda.get(0, 1);
            st_ += st.tau.get(0, 1);
        }
        let (ml, mt) = (sl / n as f64, st_ / n as f64);
        assert!((ml - 20.0).abs() / 20.0 < 0.02, "lambda mean {ml}");
        assert!((mt - 3.0).abs() / 3.0 < 0.02, "tau mean {mt}");

        st.omega.set(0, 1, 100.0);
        let mut sl = 0.0;
        for _ in 0..10_000 {
            update_adaptive_bae(&mut st, &prior, &mut rng).unwrap();
            sl += st.lambda.get(0, 1);
        }
        let ml = sl / 10_000.0;
        assert!((ml - 1.0 / 100.05).abs() < 0.001, "lambda mean {ml}");
    }

    #[test]
    fn zero_omega_latent_update_is_finite() {
        let prior = PriorSpec::bagl_default();
        let mut st = init_state(3, &prior).unwrap();
        let mut rng = RngStream::new(1);
        update_latent_scales(&mut st, &prior, &mut rng).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                let phi = st.phi.get(i, j);
                assert!(phi.is_finite() && phi > 0.0);
            }
        }
    }
}
