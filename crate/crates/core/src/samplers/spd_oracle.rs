//! Monte Carlo moments of the hierarchical Wishart model
//! `k Psi ~ Wishart(I, k)`, `(k + alpha) X | Psi ~ Wishart(Psi, k + alpha)`.
//!
//! Under the log-Euclidean metric the conditional Fréchet mean is
//! `exp E[log X | Psi]`, which has no closed form, so it is estimated here.

use nalgebra::DMatrix;
use rand::Rng;

use super::wishart::WishartSampler;
use crate::error::{GeoError, Result};
use crate::spaces::spd::{SpdPoint, SymMatrix};

pub const DEFAULT_ORACLE_REPS: usize = 100_000;

/// Estimated conditional Fréchet mean and variance of `X | Psi`.
#[derive(Clone, Debug)]
pub struct ConditionalMoments {
    pub theta: SpdPoint,
    pub sigma2: f64,
    pub sigma2_se: f64,
    /// Standard error of `log theta` in Frobenius norm, `sqrt(sigma2 / reps)`.
    pub theta_se: f64,
    pub reps: usize,
}

/// Conditional moments of `X | Psi` from `reps` draws.
pub fn spd_conditional_moments<R: Rng + ?Sized>(
    psi: &SpdPoint,
    alpha: u32,
    reps: usize,
    rng: &mut R,
) -> Result<ConditionalMoments> {
    let factor = psi
        .matrix()
        .clone()
        .cholesky()
        .ok_or(GeoError::NotPositiveDefinite)?
        .l();
    conditional_moments_from_factor(factor, alpha, reps, rng)
}

/// As [`spd_conditional_moments`], with `Psi = B B^T` given by a factor.
pub fn conditional_moments_from_factor<R: Rng + ?Sized>(
    factor: DMatrix<f64>,
    alpha: u32,
    reps: usize,
    rng: &mut R,
) -> Result<ConditionalMoments> {
    if reps < 2 {
        return Err(GeoError::domain("oracle needs at least two draws"));
    }
    let k = factor.nrows();
    let df = k as u32 + alpha;
    let sampler = WishartSampler::from_factor(factor, df)?;
    let mut logs = Vec::with_capacity(reps);
    let mut sum = DMatrix::<f64>::zeros(k, k);
    for _ in 0..reps {
        let x = sampler.sample_scaled(f64::from(df), rng)?;
        sum += x.log().matrix();
        logs.push(x.log().clone());
    }
    let mean_log = SymMatrix::new(sum / reps as f64)?;
    let d2: Vec<f64> = logs
        .iter()
        .map(|l| l.sub(&mean_log).frobenius().powi(2))
        .collect();
    let (m, se) = mean_and_se(&d2);
    // Distances are to the sample mean, which shrinks them by (reps-1)/reps.
    let correction = reps as f64 / (reps - 1) as f64;
    let sigma2 = m * correction;
    Ok(ConditionalMoments {
        theta: SpdPoint::from_log(mean_log),
        sigma2,
        sigma2_se: se * correction,
        theta_se: (sigma2 / reps as f64).sqrt(),
        reps,
    })
}

/// Marginal moments of the hierarchical model.
#[derive(Clone, Debug)]
pub struct ModelMoments {
    /// Fréchet mean of `X`, equal to that of `theta` in this flat geometry.
    pub mu: SpdPoint,
    /// Average conditional Fréchet variance `E d(X, theta)^2`.
    pub sigma2: f64,
    pub sigma2_se: f64,
    /// `E d(theta, mu)^2`.
    pub tau2: f64,
    pub tau2_se: f64,
    /// `E d(X, mu)^2`.
    pub rho_x2: f64,
    pub reps: usize,
}

/// Estimates the model moments from `reps` draws of `Psi`, each with two
/// conditionally independent observations. With `l1, l2` their logs,
/// `E|l1 - l2|^2 / 2` is the average conditional variance and
/// `E<l1 - log mu, l2 - log mu>` the spread of the conditional means.
pub fn spd_model_moments<R: Rng + ?Sized>(
    k: usize,
    alpha: u32,
    reps: usize,
    rng: &mut R,
) -> Result<ModelMoments> {
    if reps < 2 {
        return Err(GeoError::domain("oracle needs at least two draws"));
    }
    let prior = WishartSampler::from_factor(DMatrix::identity(k, k), k as u32)?;
    let df = k as u32 + alpha;
    let mut pairs = Vec::with_capacity(reps);
    let mut sum = DMatrix::<f64>::zeros(k, k);
    for _ in 0..reps {
        let psi_factor = prior.sample_factor(rng) / (k as f64).sqrt();
        let cond = WishartSampler::from_factor(psi_factor, df)?;
        let x1 = cond.sample_scaled(f64::from(df), rng)?;
        let x2 = cond.sample_scaled(f64::from(df), rng)?;
        sum += x1.log().matrix() + x2.log().matrix();
        pairs.push((x1.log().clone(), x2.log().clone()));
    }
    let log_mu = SymMatrix::new(sum / (2 * reps) as f64)?;
    let mut half_gap = Vec::with_capacity(reps);
    let mut cross = Vec::with_capacity(reps);
    let mut spread = Vec::with_capacity(reps);
    for (l1, l2) in &pairs {
        let (c1, c2) = (l1.sub(&log_mu), l2.sub(&log_mu));
        half_gap.push(0.5 * l1.sub(l2).frobenius().powi(2));
        cross.push(c1.dot(&c2));
        spread.push(0.5 * (c1.frobenius().powi(2) + c2.frobenius().powi(2)));
    }
    let (sigma2, sigma2_se) = mean_and_se(&half_gap);
    let (tau2, tau2_se) = mean_and_se(&cross);
    let (rho_x2, _) = mean_and_se(&spread);
    Ok(ModelMoments {
        mu: SpdPoint::from_log(log_mu),
        sigma2,
        sigma2_se,
        tau2,
        tau2_se,
        rho_x2,
        reps,
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
