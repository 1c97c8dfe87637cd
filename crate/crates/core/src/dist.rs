//! Random variates used by the Gibbs sweeps.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain_check, Error, Result};
use crate::linalg::{CholeskyFactor, SymmetricMatrix};

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Gamma draw with density `rate^shape / Γ(shape) y^(shape-1) exp(-rate y)`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    domain_check(shape > 0.0 && shape.is_finite(), || {
        format!("gamma shape must be positive, got {shape}")
    })?;
    domain_check(rate > 0.0 && rate.is_finite(), || {
        format!("gamma rate must be positive, got {rate}")
    })?;
    let g = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::ParameterDomain(format!("gamma({shape}, {rate}): {e}")))?;
    // Tiny shapes can underflow to exactly zero.
    Ok(g.sample(rng).max(f64::MIN_POSITIVE))
}

/// Inverse-Gaussian draw with mean `mu` and shape `lambda`, by
/// transformation with rejection (Michael, Schucany & Haas).
///
/// The smaller root is formed as `mu / (1 + t + sqrt(2t + t²))` with
/// `t = mu y / (2 lambda)`, which stays accurate when `mu / lambda` is huge.
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mu: f64, lambda: f64, rng: &mut R) -> Result<f64> {
    domain_check(mu > 0.0 && mu.is_finite(), || {
        format!("inverse-Gaussian mean must be positive, got {mu}")
    })?;
    domain_check(lambda > 0.0 && lambda.is_finite(), || {
        format!("inverse-Gaussian shape must be positive, got {lambda}")
    })?;
    let z = standard_normal(rng);
    let y = z * z;
    let t = mu * y / (2.0 * lambda);
    let x = mu / (1.0 + t + (2.0 * t + t * t).sqrt());
    let u: f64 = rng.random();
    let draw = if u * (mu + x) <= mu { x } else { mu * mu / x };
    Ok(draw.max(f64::MIN_POSITIVE))
}

/// Multivariate normal draw `mean + L z` with `covariance = L Lᵀ`.
pub fn sample_mvn<R: Rng + ?Sized>(
    mean: &[f64],
    covariance: &SymmetricMatrix,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if mean.len() != covariance.dim() {
        return Err(Error::Shape(format!(
            "mean has length {}, covariance is {}x{}",
            mean.len(),
            covariance.dim(),
            covariance.dim()
        )));
    }
    let chol = covariance.cholesky()?;
    Ok(mvn_from_factor(mean, &chol, rng))
}

pub(crate) fn mvn_from_factor<R: Rng + ?Sized>(
    mean: &[f64],
    chol: &CholeskyFactor,
    rng: &mut R,
) -> Vec<f64> {
    let d = mean.len();
    let z: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
    (0..d)
        .map(|i| mean[i] + (0..=i).map(|k| chol.l(i, k) * z[k]).sum::<f64>())
        .collect()
}

/// Wishart draw via the Bartlett decomposition; `E[W] = df * scale`.
pub fn sample_wishart<R: Rng + ?Sized>(
    df: f64,
    scale: &SymmetricMatrix,
    rng: &mut R,
) -> Result<SymmetricMatrix> {
    let p = scale.dim();
    domain_check(df > (p as f64) - 1.0 && df.is_finite(), || {
        format!("Wishart df must exceed dim-1 = {}, got {df}", p - 1)
    })?;
    let chol = scale
        .cholesky()
        .map_err(|_| Error::ParameterDomain("Wishart scale is not positive definite".into()))?;
    Ok(wishart_from_factor(df, &chol, rng))
}

pub(crate) fn wishart_from_factor<R: Rng + ?Sized>(
    df: f64,
    chol: &CholeskyFactor,
    rng: &mut R,
) -> SymmetricMatrix {
    let p = chol.dim();
    // Bartlett factor A: chi on the diagonal, standard normals below.
    let mut a = vec![0.0; p * p];
    for i in 0..p {
        let chi2 = Gamma::new((df - i as f64) / 2.0, 2.0)
            .expect("df checked by caller")
            .sample(rng);
        a[i * p + i] = chi2.sqrt();
        for j in 0..i {
            a[i * p + j] = standard_normal(rng);
        }
    }
    // B = L A is lower triangular; W = B Bᵀ.
    let mut b = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            b[i * p + j] = (j..=i).map(|k| chol.l(i, k) * a[k * p + j]).sum();
        }
    }
    SymmetricMatrix::from_fn(p, |i, j| {
        (0..=i.min(j)).map(|k| b[i * p + k] * b[j * p + k]).sum()
    })
}
