use serde::{Deserialize, Serialize};

use super::demos::{demo_circle, demo_tripod};
use super::output::{CsvRow, ExperimentOutput};
use super::spd::{run_spd_bayes, run_spd_freq, ShrinkPoint};
use super::table1::run_table1;
use super::Runner;
use crate::error::{GeoError, Result};

pub const DEFAULT_SEED: u64 = 20_190_613;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(GeoError::domain(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(GeoError::domain(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

/// Two walkers on the 3-regular tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Table1Config {
    pub k_sigma2: Vec<usize>,
    pub k_tau2: usize,
    /// Distances of the fixed shrinkage points from the origin.
    pub distances: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            k_sigma2: vec![1, 5, 10, 15, 20, 25, 30],
            k_tau2: 15,
            distances: vec![0, 1, 4, 8, 16, 32],
            reps: 20_000,
            seed: default_seed(),
        }
    }
}

impl Table1Config {
    pub fn validate(&self) -> Result<()> {
        positive("reps", self.reps)?;
        nonempty("k_sigma2", &self.k_sigma2)?;
        if self.k_sigma2.contains(&0) {
            return Err(GeoError::domain("k_sigma2 values must be at least 1"));
        }
        Ok(())
    }
}

/// Hierarchical Wishart model, Bayes risk against the number of groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpdBayesConfig {
    pub k: usize,
    pub alphas: Vec<u32>,
    pub n_values: Vec<usize>,
    pub shrink_points: Vec<String>,
    /// Independent draws of the group parameters.
    pub outer_reps: usize,
    /// Observation draws per parameter draw.
    pub inner_reps: usize,
    /// Draws used to estimate the model moments.
    pub oracle_reps: usize,
    pub seed: u64,
}

impl Default for SpdBayesConfig {
    fn default() -> Self {
        SpdBayesConfig {
            k: 3,
            alphas: vec![0, 2, 8],
            n_values: vec![1, 2, 3, 5, 10, 15, 20, 30, 40, 50],
            shrink_points: ["0.1I", "I", "10I", "100I", "xbar", "mu"]
                .map(String::from)
                .to_vec(),
            outer_reps: 1_000,
            inner_reps: 100,
            oracle_reps: 100_000,
            seed: default_seed(),
        }
    }
}

impl SpdBayesConfig {
    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("outer_reps", self.outer_reps)?;
        positive("inner_reps", self.inner_reps)?;
        if self.oracle_reps < 2 {
            return Err(GeoError::domain("oracle_reps must be at least 2"));
        }
        nonempty("alphas", &self.alphas)?;
        nonempty("n_values", &self.n_values)?;
        if self.n_values.contains(&0) {
            return Err(GeoError::domain("n_values must be at least 1"));
        }
        for p in &self.shrink_points {
            p.parse::<ShrinkPoint>()?;
        }
        Ok(())
    }
}

/// Fixed draws of the group parameters, frequentist risk per draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpdFreqConfig {
    pub k: usize,
    pub alpha: u32,
    /// Number of parameter configurations.
    pub psi_draws: usize,
    pub n_values: Vec<usize>,
    pub shrink_points: Vec<String>,
    /// Observation draws per configuration.
    pub inner_reps: usize,
    /// Draws per group for the conditional mean and variance.
    pub oracle_reps: usize,
    pub seed: u64,
}

impl Default for SpdFreqConfig {
    fn default() -> Self {
        SpdFreqConfig {
            k: 3,
            alpha: 0,
            psi_draws: 100,
            n_values: (1..=60).collect(),
            shrink_points: ["10I", "100I", "xbar"].map(String::from).to_vec(),
            inner_reps: 100,
            oracle_reps: 10_000,
            seed: default_seed(),
        }
    }
}

impl SpdFreqConfig {
    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("psi_draws", self.psi_draws)?;
        positive("inner_reps", self.inner_reps)?;
        if self.oracle_reps < 2 {
            return Err(GeoError::domain("oracle_reps must be at least 2"));
        }
        nonempty("n_values", &self.n_values)?;
        if self.n_values.contains(&0) {
            return Err(GeoError::domain("n_values must be at least 1"));
        }
        for p in &self.shrink_points {
            if matches!(p.parse::<ShrinkPoint>()?, ShrinkPoint::Mu) {
                return Err(GeoError::domain("mu is not defined for fixed parameters"));
            }
        }
        Ok(())
    }
}

/// Shrinkage on the circle towards the point opposite the mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircleConfig {
    pub t_grid: Vec<f64>,
    pub reps: usize,
    /// Angle of the shrinkage point.
    pub psi_angle: f64,
    pub seed: u64,
}

impl Default for CircleConfig {
    fn default() -> Self {
        CircleConfig {
            t_grid: (0..=10).map(|i| f64::from(i) * 0.05).collect(),
            reps: 100_000,
            psi_angle: std::f64::consts::PI,
            seed: default_seed(),
        }
    }
}

impl CircleConfig {
    pub fn validate(&self) -> Result<()> {
        positive("reps", self.reps)?;
        nonempty("t_grid", &self.t_grid)?;
        if self.t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(GeoError::domain("t_grid values must lie in [0, 1]"));
        }
        if !self.psi_angle.is_finite() {
            return Err(GeoError::domain("psi_angle must be finite"));
        }
        Ok(())
    }
}

/// A fully specified experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    Table1(Table1Config),
    SpdBayes(SpdBayesConfig),
    SpdFreq(SpdFreqConfig),
    DemoTripod,
    DemoCircle(CircleConfig),
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::Table1(_) => "table1",
            ExperimentSpec::SpdBayes(_) => "spd_bayes",
            ExperimentSpec::SpdFreq(_) => "spd_freq",
            ExperimentSpec::DemoTripod => "demo_tripod",
            ExperimentSpec::DemoCircle(_) => "demo_circle",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentSpec::Table1(c) => c.seed,
            ExperimentSpec::SpdBayes(c) => c.seed,
            ExperimentSpec::SpdFreq(c) => c.seed,
            ExperimentSpec::DemoTripod => 0,
            ExperimentSpec::DemoCircle(c) => c.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentSpec::Table1(c) => c.validate(),
            ExperimentSpec::SpdBayes(c) => c.validate(),
            ExperimentSpec::SpdFreq(c) => c.validate(),
            ExperimentSpec::DemoTripod => Ok(()),
            ExperimentSpec::DemoCircle(c) => c.validate(),
        }
    }

    /// Runs the experiment and collects its table rows and report.
    pub fn run(&self, runner: &Runner) -> Result<ExperimentOutput> {
        self.validate()?;
        let config = serde_json::to_value(self).map_err(|e| GeoError::domain(e.to_string()))?;
        let name = self.name();
        let (rows, report, passed) = match self {
            ExperimentSpec::Table1(c) => {
                let cells = run_table1(c, runner)?;
                let rows = cells
                    .iter()
                    .map(|cell| CsvRow {
                        experiment: name.into(),
                        n: 2,
                        alpha_or_ksigma: cell.k_sigma2 as f64,
                        shrink_point: cell.column.shrink_point(),
                        estimator: cell.column.estimator().into(),
                        mean_loss: cell.ratio,
                        std_error: cell.std_error,
                        replicates: cell.replicates,
                        seed: c.seed,
                    })
                    .collect();
                (rows, super::table1::format_table(&cells), true)
            }
            ExperimentSpec::SpdBayes(c) => {
                let result = run_spd_bayes(c, runner)?;
                (result.rows(name, c.seed), result.report(), true)
            }
            ExperimentSpec::SpdFreq(c) => {
                let result = run_spd_freq(c, runner)?;
                (result.rows(name, c.seed), result.report(), true)
            }
            ExperimentSpec::DemoTripod => {
                let report = demo_tripod()?;
                (report.rows(name), report.to_string(), report.passed())
            }
            ExperimentSpec::DemoCircle(c) => {
                let report = demo_circle(c, runner)?;
                (
                    report.rows(name, c.seed),
                    report.to_string(),
                    report.passed(),
                )
            }
        };
        Ok(ExperimentOutput {
            experiment: name.into(),
            config,
            rows,
            report,
            passed,
        })
    }
}
