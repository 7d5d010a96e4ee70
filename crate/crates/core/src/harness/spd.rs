//! Experiments on SPD matrices under the hierarchical Wishart model
//! `k Psi_i ~ Wishart(I, k)`, `(k + alpha) X_i | Psi_i ~ Wishart(Psi_i, k + alpha)`.
//!
//! The log-Euclidean metric makes `log` an isometry onto symmetric matrices,
//! so the estimators run on log coordinates in `R^{k^2}`; this gives exactly
//! the estimates of the matrix-valued computation at a fraction of the cost.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::output::CsvRow;
use super::{mean_and_se, Runner, SpdBayesConfig, SpdFreqConfig};
use crate::error::{GeoError, Result};
use crate::estimators::{geodesic_js, oracle_weight, ShrinkageSpec, Target, Variance, WeightRule};
use crate::geometry::{ProductPoint, ProductSpace};
use crate::rng::RngStream;
use crate::samplers::{
    conditional_moments_from_factor, spd_model_moments, ModelMoments, WishartSampler,
};
use crate::spaces::euclidean::{Euclidean, EuclideanPoint};
use crate::spaces::spd::SpdPoint;

/// Row-major entries of `log A`; Euclidean distance between these equals the
/// log-Euclidean distance.
pub fn log_coords(a: &SpdPoint) -> EuclideanPoint {
    EuclideanPoint(log_matrix_coords(a.log().matrix()))
}

fn log_matrix_coords(m: &DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows();
    (0..k)
        .flat_map(|i| (0..k).map(move |j| m[(i, j)]))
        .collect()
}

/// Shrinkage target named in a configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShrinkPoint {
    /// `c I`.
    ScaledIdentity(f64),
    SampleMean,
    Mu,
}

impl FromStr for ShrinkPoint {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xbar" => Ok(ShrinkPoint::SampleMean),
            "mu" => Ok(ShrinkPoint::Mu),
            "I" => Ok(ShrinkPoint::ScaledIdentity(1.0)),
            _ => {
                let c = s
                    .strip_suffix('I')
                    .and_then(|c| c.parse::<f64>().ok())
                    .filter(|c| *c > 0.0 && c.is_finite())
                    .ok_or_else(|| GeoError::domain(format!("unknown shrinkage point {s:?}")))?;
                Ok(ShrinkPoint::ScaledIdentity(c))
            }
        }
    }
}

fn identity_log_coords(k: usize, c: f64) -> EuclideanPoint {
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = c.ln();
    }
    EuclideanPoint(v)
}

/// `(1/n) sum_i <d_i - y1_i, d_i - y2_i>`: unbiased for `d(delta, theta)^2`
/// when `y1`, `y2` are independent log-draws with mean `log theta`,
/// independent of `delta`.
fn pair_loss(
    delta: &ProductPoint<EuclideanPoint>,
    y1: &[EuclideanPoint],
    y2: &[EuclideanPoint],
) -> f64 {
    let n = delta.len();
    let mut total = 0.0;
    for i in 0..n {
        let d = delta[i].coords();
        total += d
            .iter()
            .zip(y1[i].coords().iter().zip(y2[i].coords()))
            .map(|(d, (a, b))| (d - a) * (d - b))
            .sum::<f64>();
    }
    total / n as f64
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Clone, Debug)]
pub struct SpdBayesCurve {
    pub alpha: u32,
    pub n: usize,
    pub shrink_point: String,
    pub estimator: String,
    pub mean: f64,
    pub std_error: f64,
    pub replicates: usize,
}

#[derive(Clone, Debug)]
pub struct SpdBayesResult {
    pub moments: Vec<(u32, ModelMoments)>,
    pub curves: Vec<SpdBayesCurve>,
}

impl SpdBayesResult {
    pub fn risk(
        &self,
        alpha: u32,
        n: usize,
        shrink_point: &str,
        estimator: &str,
    ) -> Option<&SpdBayesCurve> {
        self.curves.iter().find(|c| {
            c.alpha == alpha
                && c.n == n
                && c.shrink_point == shrink_point
                && c.estimator == estimator
        })
    }

    pub fn rows(&self, experiment: &str, seed: u64) -> Vec<CsvRow> {
        self.curves
            .iter()
            .map(|c| CsvRow {
                experiment: experiment.into(),
                n: c.n,
                alpha_or_ksigma: f64::from(c.alpha),
                shrink_point: c.shrink_point.clone(),
                estimator: c.estimator.clone(),
                mean_loss: c.mean,
                std_error: c.std_error,
                replicates: c.replicates,
                seed,
            })
            .collect()
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        for (alpha, m) in &self.moments {
            let _ = writeln!(
                out,
                "alpha={alpha}: sigma2={:.4} (se {:.4}), tau2={:.4} (se {:.4}), E d(X,mu)^2={:.4}",
                m.sigma2, m.sigma2_se, m.tau2, m.tau2_se, m.rho_x2
            );
            let ns: Vec<usize> = {
                let mut v: Vec<usize> = self
                    .curves
                    .iter()
                    .filter(|c| c.alpha == *alpha)
                    .map(|c| c.n)
                    .collect();
                v.dedup();
                v
            };
            for n in ns {
                let Some(x) = self.risk(*alpha, n, "none", "x") else {
                    continue;
                };
                let mut line = format!("  n={n:>3} risk(X)={:.4}", x.mean);
                for c in self
                    .curves
                    .iter()
                    .filter(|c| c.alpha == *alpha && c.n == n && c.estimator != "x")
                {
                    let _ = write!(
                        line,
                        "  {}:{}={:.3}",
                        c.estimator,
                        c.shrink_point,
                        c.mean / x.mean
                    );
                }
                let _ = writeln!(out, "{line}");
            }
        }
        out
    }
}

struct Estimator {
    shrink_point: String,
    estimator: &'static str,
    target: Option<ShrinkPoint>,
    fixed_weight: Option<f64>,
}

/// Bayes risks of `X`, the James-Stein estimator for each shrinkage point, and
/// the fixed-weight shrinkage towards `mu` that minimises the CAT(0) bound.
///
/// Groups are nested: one outer replicate draws parameters for the largest
/// `n`, and each smaller `n` uses the leading groups. The loss uses two
/// further independent observations per group in place of the unknown
/// conditional mean: `(1/n) sum_i <d_i - y1_i, d_i - y2_i>` has expectation
/// `d(delta, theta)^2` given `theta` and `delta`.
pub fn run_spd_bayes(config: &SpdBayesConfig, runner: &Runner) -> Result<SpdBayesResult> {
    config.validate()?;
    let k = config.k;
    let n_max = *config.n_values.iter().max().expect("validated nonempty");
    let mut curves = Vec::new();
    let mut moments_out = Vec::new();

    for (ai, &alpha) in config.alphas.iter().enumerate() {
        let mut rng = RngStream::derive(
            config.seed,
            "spd_bayes/moments",
            ai as u64,
            u64::from(alpha),
        );
        let moments = spd_model_moments(k, alpha, config.oracle_reps, &mut rng)?;
        let mu = log_coords(&moments.mu);
        let sigma2 = moments.sigma2;
        let best = oracle_weight(sigma2, moments.rho_x2, moments.tau2)?.weight;

        let mut estimators = vec![Estimator {
            shrink_point: "none".into(),
            estimator: "x",
            target: None,
            fixed_weight: None,
        }];
        for s in &config.shrink_points {
            estimators.push(Estimator {
                shrink_point: s.clone(),
                estimator: "js",
                target: Some(s.parse()?),
                fixed_weight: None,
            });
        }
        estimators.push(Estimator {
            shrink_point: "mu".into(),
            estimator: "best",
            target: Some(ShrinkPoint::Mu),
            fixed_weight: Some(best),
        });

        let spaces: Vec<ProductSpace<Euclidean>> = config
            .n_values
            .iter()
            .map(|&n| ProductSpace::uniform(Euclidean::new(k * k), n))
            .collect::<Result<_>>()?;
        let specs: Vec<Vec<Option<ShrinkageSpec<EuclideanPoint>>>> = config
            .n_values
            .iter()
            .map(|&n| {
                estimators
                    .iter()
                    .map(|e| {
                        let target = match e.target? {
                            ShrinkPoint::ScaledIdentity(c) => Target::Fixed(
                                ProductPoint::replicate(&identity_log_coords(k, c), n),
                            ),
                            ShrinkPoint::SampleMean => Target::AdaptiveSampleMean,
                            ShrinkPoint::Mu => Target::OracleMu(ProductPoint::replicate(&mu, n)),
                        };
                        let weight = e
                            .fixed_weight
                            .map_or(WeightRule::JamesStein, WeightRule::Fixed);
                        Some(ShrinkageSpec {
                            variance: Variance::Common(sigma2),
                            target,
                            weight,
                        })
                    })
                    .collect()
            })
            .collect();

        let df = k as u32 + alpha;
        let prior = WishartSampler::from_factor(DMatrix::identity(k, k), k as u32)?;
        let tag = format!("spd_bayes/alpha={alpha}");
        let per_outer = runner.try_map(config.outer_reps, |r| -> Result<Vec<f64>> {
            let mut rng = RngStream::derive(config.seed, &tag, ai as u64, r as u64);
            let conds = (0..n_max)
                .map(|_| {
                    WishartSampler::from_factor(
                        prior.sample_factor(&mut rng) / (k as f64).sqrt(),
                        df,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut sums = vec![0.0; config.n_values.len() * estimators.len()];
            for _ in 0..config.inner_reps {
                let mut x = Vec::with_capacity(n_max);
                let mut y1 = Vec::with_capacity(n_max);
                let mut y2 = Vec::with_capacity(n_max);
                for c in &conds {
                    x.push(log_coords(&c.sample_scaled(f64::from(df), &mut rng)?));
                    y1.push(log_coords(&c.sample_scaled(f64::from(df), &mut rng)?));
                    y2.push(log_coords(&c.sample_scaled(f64::from(df), &mut rng)?));
                }
                for (ni, &n) in config.n_values.iter().enumerate() {
                    let xn = ProductPoint(x[..n].to_vec());
                    for (ei, spec) in specs[ni].iter().enumerate() {
                        let loss = match spec {
                            None => pair_loss(&xn, &y1, &y2),
                            Some(spec) => {
                                pair_loss(&geodesic_js(&spaces[ni], &xn, spec)?.points, &y1, &y2)
                            }
                        };
                        sums[ni * estimators.len() + ei] += loss;
                    }
                }
            }
            Ok(sums
                .into_iter()
                .map(|s| s / config.inner_reps as f64)
                .collect())
        })?;

        for (ni, &n) in config.n_values.iter().enumerate() {
            for (ei, e) in estimators.iter().enumerate() {
                let col: Vec<f64> = per_outer
                    .iter()
                    .map(|v| v[ni * estimators.len() + ei])
                    .collect();
                let (mean, se) = mean_and_se(&col)?;
                curves.push(SpdBayesCurve {
                    alpha,
                    n,
                    shrink_point: e.shrink_point.clone(),
                    estimator: e.estimator.into(),
                    mean,
                    std_error: se,
                    replicates: config.outer_reps * config.inner_reps,
                });
            }
        }
        moments_out.push((alpha, moments));
    }
    Ok(SpdBayesResult {
        moments: moments_out,
        curves,
    })
}

/// Per `(n, shrink point)`: how many parameter draws the James-Stein
/// estimator beats `X` on, and the average risk difference.
#[derive(Clone, Debug)]
pub struct SpdFreqPoint {
    pub n: usize,
    pub shrink_point: String,
    pub proportion: f64,
    pub mean_diff: f64,
    pub mean_diff_se: f64,
}

#[derive(Clone, Debug)]
pub struct SpdFreqResult {
    pub alpha: u32,
    pub psi_draws: usize,
    pub inner_reps: usize,
    pub points: Vec<SpdFreqPoint>,
}

impl SpdFreqResult {
    pub fn proportion(&self, n: usize, shrink_point: &str) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.n == n && p.shrink_point == shrink_point)
            .map(|p| p.proportion)
    }

    /// Smallest `n` on the grid from which the proportion stays at 1.
    pub fn first_full_domination(&self, shrink_point: &str) -> Option<usize> {
        let mut pts: Vec<&SpdFreqPoint> = self
            .points
            .iter()
            .filter(|p| p.shrink_point == shrink_point)
            .collect();
        pts.sort_by_key(|p| p.n);
        let last_fail = pts.iter().rposition(|p| p.proportion < 1.0);
        match last_fail {
            None => pts.first().map(|p| p.n),
            Some(i) => pts.get(i + 1).map(|p| p.n),
        }
    }

    pub fn rows(&self, experiment: &str, seed: u64) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for p in &self.points {
            let c = self.psi_draws as f64;
            rows.push(CsvRow {
                experiment: experiment.into(),
                n: p.n,
                alpha_or_ksigma: f64::from(self.alpha),
                shrink_point: p.shrink_point.clone(),
                estimator: "prop_dominating".into(),
                mean_loss: p.proportion,
                std_error: (p.proportion * (1.0 - p.proportion) / c).sqrt(),
                replicates: self.psi_draws,
                seed,
            });
            rows.push(CsvRow {
                experiment: experiment.into(),
                n: p.n,
                alpha_or_ksigma: f64::from(self.alpha),
                shrink_point: p.shrink_point.clone(),
                estimator: "risk_diff".into(),
                mean_loss: p.mean_diff,
                std_error: p.mean_diff_se,
                replicates: self.psi_draws * self.inner_reps,
                seed,
            });
        }
        rows
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut names: Vec<&str> = self
            .points
            .iter()
            .map(|p| p.shrink_point.as_str())
            .collect();
        names.sort();
        names.dedup();
        for name in names {
            let first = self
                .first_full_domination(name)
                .map_or("never".to_string(), |n| n.to_string());
            let _ = writeln!(out, "psi={name}: proportion reaches 1 from n={first}");
            let line: Vec<String> = self
                .points
                .iter()
                .filter(|p| p.shrink_point == name)
                .map(|p| format!("{}:{:.2}", p.n, p.proportion))
                .collect();
            let _ = writeln!(out, "  {}", line.join(" "));
        }
        out
    }
}

/// Frequentist comparison over fixed parameter draws `Psi_i = W_i / k`,
/// `W_i ~ Wishart(I, k)`. Each group's conditional mean and variance come
/// from the Monte Carlo oracle; the risk difference of the James-Stein
/// estimator against `X` is averaged over paired observation draws.
pub fn run_spd_freq(config: &SpdFreqConfig, runner: &Runner) -> Result<SpdFreqResult> {
    config.validate()?;
    let k = config.k;
    let alpha = config.alpha;
    let df = k as u32 + alpha;
    let n_max = *config.n_values.iter().max().expect("validated nonempty");
    let targets: Vec<ShrinkPoint> = config
        .shrink_points
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let spaces: Vec<ProductSpace<Euclidean>> = config
        .n_values
        .iter()
        .map(|&n| ProductSpace::uniform(Euclidean::new(k * k), n))
        .collect::<Result<_>>()?;
    let prior = WishartSampler::from_factor(DMatrix::identity(k, k), k as u32)?;
    let cells = config.n_values.len() * targets.len();
    let tag = format!("spd_freq/alpha={alpha}");

    // Per draw: (mean difference, standard error) for every (n, target).
    let per_draw = runner.try_map(config.psi_draws, |c| -> Result<Vec<(f64, f64)>> {
        let mut rng = RngStream::derive(config.seed, &tag, c as u64, 0);
        let factors: Vec<DMatrix<f64>> = (0..n_max)
            .map(|_| prior.sample_factor(&mut rng) / (k as f64).sqrt())
            .collect();
        let mut theta = Vec::with_capacity(n_max);
        let mut sigma2 = Vec::with_capacity(n_max);
        let mut conds = Vec::with_capacity(n_max);
        for (i, f) in factors.into_iter().enumerate() {
            let mut orng =
                RngStream::derive(config.seed, &format!("{tag}/oracle"), c as u64, i as u64);
            let m =
                conditional_moments_from_factor(f.clone(), alpha, config.oracle_reps, &mut orng)?;
            theta.push(log_coords(&m.theta));
            sigma2.push(m.sigma2);
            conds.push(WishartSampler::from_factor(f, df)?);
        }
        let specs: Vec<Vec<ShrinkageSpec<EuclideanPoint>>> = config
            .n_values
            .iter()
            .map(|&n| {
                targets
                    .iter()
                    .map(|t| {
                        let target = match t {
                            ShrinkPoint::ScaledIdentity(c) => Target::Fixed(
                                ProductPoint::replicate(&identity_log_coords(k, *c), n),
                            ),
                            _ => Target::AdaptiveSampleMean,
                        };
                        ShrinkageSpec::james_stein(Variance::PerGroup(sigma2[..n].to_vec()), target)
                    })
                    .collect()
            })
            .collect();

        let mut sum = vec![0.0; cells];
        let mut sum_sq = vec![0.0; cells];
        for _ in 0..config.inner_reps {
            let x = conds
                .iter()
                .map(|s| {
                    s.sample_scaled(f64::from(df), &mut rng)
                        .map(|p| log_coords(&p))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut base = 0.0;
            let mut base_at = Vec::with_capacity(n_max + 1);
            base_at.push(0.0);
            for i in 0..n_max {
                base += sq_dist(x[i].coords(), theta[i].coords());
                base_at.push(base);
            }
            for (ni, &n) in config.n_values.iter().enumerate() {
                let xn = ProductPoint(x[..n].to_vec());
                for (ti, spec) in specs[ni].iter().enumerate() {
                    let est = geodesic_js(&spaces[ni], &xn, spec)?;
                    let loss: f64 = (0..n)
                        .map(|i| sq_dist(est.points[i].coords(), theta[i].coords()))
                        .sum();
                    let diff = (loss - base_at[n]) / n as f64;
                    sum[ni * targets.len() + ti] += diff;
                    sum_sq[ni * targets.len() + ti] += diff * diff;
                }
            }
        }
        let m = config.inner_reps as f64;
        Ok(sum
            .iter()
            .zip(&sum_sq)
            .map(|(s, q)| {
                let mean = s / m;
                let var = if m > 1.0 {
                    ((q - m * mean * mean) / (m - 1.0)).max(0.0)
                } else {
                    0.0
                };
                (mean, (var / m).sqrt())
            })
            .collect())
    })?;

    let mut points = Vec::new();
    for (ni, &n) in config.n_values.iter().enumerate() {
        for (ti, name) in config.shrink_points.iter().enumerate() {
            let idx = ni * targets.len() + ti;
            let diffs: Vec<f64> = per_draw.iter().map(|v| v[idx].0).collect();
            let wins = diffs.iter().filter(|d| **d < 0.0).count();
            let (mean_diff, mean_diff_se) = mean_and_se(&diffs)?;
            points.push(SpdFreqPoint {
                n,
                shrink_point: name.clone(),
                proportion: wins as f64 / config.psi_draws as f64,
                mean_diff,
                mean_diff_se,
            });
        }
    }
    Ok(SpdFreqResult {
        alpha,
        psi_draws: config.psi_draws,
        inner_reps: config.inner_reps,
        points,
    })
}
