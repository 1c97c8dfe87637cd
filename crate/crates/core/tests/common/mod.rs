//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls into the sampler code paths it is used to check.
#![allow(dead_code)]

use bae::{PriorSpec, SymmetricMatrix};

/// Unnormalized log posterior of a 2x2 precision matrix after
/// marginalizing every latent and adaptive parameter analytically.
pub fn log_posterior_2x2(
    prior: &PriorSpec,
    s: &SymmetricMatrix,
    n: usize,
    w11: f64,
    w22: f64,
    w12: f64,
) -> f64 {
    let det = w11 * w22 - w12 * w12;
    if w11 <= 0.0 || det <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let lik = 0.5 * n as f64 * det.ln()
        - 0.5 * (s.get(0, 0) * w11 + s.get(1, 1) * w22 + 2.0 * s.get(0, 1) * w12);
    let prior_term = match *prior {
        PriorSpec::Bae {
            r_tau,
            s_lambda,
            lambda_diag,
            tau_diag,
            ..
        } => {
            // lambda: p(l | w) = GA(1, |w| + s)  =>  marginal 1/(|w| + s)
            // tau:    p(t | w) = GA(3/2, w²/2 + r) => (w²/2 + r)^(-3/2)
            -0.5 * (lambda_diag + tau_diag) * (w11 + w22)
                - (w12.abs() + s_lambda).ln()
                - 1.5 * (0.5 * w12 * w12 + r_tau).ln()
        }
        PriorSpec::Bagl { r, s, lambda_diag } => {
            -0.5 * lambda_diag * (w11 + w22) - (1.0 + r) * (w12.abs() + s).ln()
        }
        PriorSpec::Bagr { a, b } => -0.5 * (w11 + w22) - (a + 0.5) * (0.5 * w12 * w12 + b).ln(),
    };
    lik + prior_term
}

/// Posterior mean of (w11, w22, w12) by midpoint-rule integration over a
/// box that contains essentially all of the mass.
pub fn grid_posterior_mean_2x2(
    prior: &PriorSpec,
    s: &SymmetricMatrix,
    n: usize,
    diag_range: (f64, f64),
    off_range: (f64, f64),
    steps: usize,
) -> [f64; 3] {
    let h_d = (diag_range.1 - diag_range.0) / steps as f64;
    let h_o = (off_range.1 - off_range.0) / steps as f64;
    let mid = |lo: f64, h: f64, i: usize| lo + (i as f64 + 0.5) * h;
    let mut max_log = f64::NEG_INFINITY;
    for a in 0..steps {
        for b in 0..steps {
            for c in 0..steps {
                let l = log_posterior_2x2(
                    prior,
                    s,
                    n,
                    mid(diag_range.0, h_d, a),
                    mid(diag_range.0, h_d, b),
                    mid(off_range.0, h_o, c),
                );
                max_log = max_log.max(l);
            }
        }
    }
    let mut z = 0.0;
    let mut m = [0.0; 3];
    for a in 0..steps {
        let w11 = mid(diag_range.0, h_d, a);
        for b in 0..steps {
            let w22 = mid(diag_range.0, h_d, b);
            for c in 0..steps {
                let w12 = mid(off_range.0, h_o, c);
                let wt = (log_posterior_2x2(prior, s, n, w11, w22, w12) - max_log).exp();
                z += wt;
                m[0] += wt * w11;
                m[1] += wt * w22;
                m[2] += wt * w12;
            }
        }
    }
    m.map(|v| v / z)
}

/// CDF of GA(shape, rate) for the two shapes the adaptive updates use.
pub fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = rate * x;
    if shape == 1.0 {
        1.0 - (-y).exp()
    } else if shape == 1.5 {
        // P(3/2, y) = erf(sqrt y) - 2 sqrt(y/pi) e^{-y}
        libm::erf(y.sqrt()) - 2.0 * (y / std::f64::consts::PI).sqrt() * (-y).exp()
    } else {
        panic!("closed-form CDF only for shape 1 and 3/2")
    }
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the KS statistic at level alpha = 0.01.
pub fn ks_critical_001(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}
