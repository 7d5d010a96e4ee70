//! Monte Carlo risk estimation and the experiment runners.
//!
//! Replicates run on a rayon pool, each with its own random stream, and their
//! results are reduced in replicate order with compensated summation. Output
//! is therefore bitwise independent of the number of workers.

mod config;
mod demos;
mod output;
mod spd;
mod table1;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::geometry::{GeodesicSpace, ProductPoint, ProductSpace};
use crate::rng::RngStream;

pub use config::{CircleConfig, ExperimentSpec, SpdBayesConfig, SpdFreqConfig, Table1Config};
pub use demos::{demo_circle, demo_tripod, CircleReport, CircleRow, TripodReport};
pub use output::{render_csv, render_json, render_svg, CsvRow, ExperimentOutput};
pub use spd::{
    log_coords, run_spd_bayes, run_spd_freq, ShrinkPoint, SpdBayesResult, SpdFreqResult,
};
pub use table1::{reference_value, run_table1, Table1Cell, Table1Column, TABLE1_REFERENCE};

/// Monte Carlo estimate of a risk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub mean_loss: f64,
    /// Sample standard deviation over `sqrt(replicates)`.
    pub std_error: f64,
    pub replicates: usize,
    pub seed: u64,
    pub estimator: String,
    pub n: usize,
    pub shrink_point: String,
}

impl RiskEstimate {
    pub fn from_losses(losses: &[f64], seed: u64) -> Result<Self> {
        let (mean, se) = mean_and_se(losses)?;
        Ok(RiskEstimate {
            mean_loss: mean,
            std_error: se,
            replicates: losses.len(),
            seed,
            estimator: String::new(),
            n: 0,
            shrink_point: String::new(),
        })
    }

    pub fn labelled(mut self, estimator: &str, n: usize, shrink_point: &str) -> Self {
        self.estimator = estimator.to_string();
        self.n = n;
        self.shrink_point = shrink_point.to_string();
        self
    }
}

/// Neumaier-compensated sum, in slice order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(GeoError::domain("no replicates"));
    }
    let n = xs.len() as f64;
    let mean = compensated_sum(xs) / n;
    if xs.len() == 1 {
        return Ok((mean, 0.0));
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = compensated_sum(&dev) / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// A fixed-size worker pool for replicate loops.
pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(GeoError::domain("need at least one worker"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| GeoError::domain(format!("cannot start worker pool: {e}")))?;
        Ok(Runner { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// `f(0), ..., f(count - 1)` in index order.
    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        self.pool
            .install(|| (0..count).into_par_iter().map(&f).collect())
    }

    /// As [`Runner::map`], stopping at the first error in index order.
    pub fn try_map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync,
    {
        self.map(count, f).into_iter().collect()
    }
}

/// Frequentist risk `E L(theta, delta(X))` at a fixed `theta`, with the
/// averaged squared product distance as loss.
#[allow(clippy::too_many_arguments)]
pub fn mc_frequentist_risk<S, C, E>(
    runner: &Runner,
    spaces: &ProductSpace<S>,
    theta: &ProductPoint<S::Point>,
    conditional: C,
    estimator: E,
    reps: usize,
    seed: u64,
    tag: &str,
) -> Result<RiskEstimate>
where
    S: GeodesicSpace,
    C: Fn(&ProductPoint<S::Point>, &mut RngStream) -> Result<ProductPoint<S::Point>> + Sync,
    E: Fn(&ProductPoint<S::Point>) -> Result<ProductPoint<S::Point>> + Sync,
{
    if reps == 0 {
        return Err(GeoError::domain("reps must be at least 1"));
    }
    let losses = runner.try_map(reps, |r| {
        let mut rng = RngStream::derive(seed, tag, 0, r as u64);
        let x = conditional(theta, &mut rng)?;
        spaces.dist2(&estimator(&x)?, theta)
    })?;
    RiskEstimate::from_losses(&losses, seed)
}

/// Bayes risk: `theta` from the prior, then `X | theta`.
#[allow(clippy::too_many_arguments)]
pub fn mc_bayes_risk<S, P, C, E>(
    runner: &Runner,
    spaces: &ProductSpace<S>,
    prior: P,
    conditional: C,
    estimator: E,
    reps: usize,
    seed: u64,
    tag: &str,
) -> Result<RiskEstimate>
where
    S: GeodesicSpace,
    P: Fn(&mut RngStream) -> Result<ProductPoint<S::Point>> + Sync,
    C: Fn(&ProductPoint<S::Point>, &mut RngStream) -> Result<ProductPoint<S::Point>> + Sync,
    E: Fn(&ProductPoint<S::Point>) -> Result<ProductPoint<S::Point>> + Sync,
{
    if reps == 0 {
        return Err(GeoError::domain("reps must be at least 1"));
    }
    let losses = runner.try_map(reps, |r| {
        let mut rng = RngStream::derive(seed, tag, 0, r as u64);
        let theta = prior(&mut rng)?;
        let x = conditional(&theta, &mut rng)?;
        spaces.dist2(&estimator(&x)?, &theta)
    })?;
    RiskEstimate::from_losses(&losses, seed)
}

#[cfg(test)]
mod tests;
