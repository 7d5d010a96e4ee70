//! Bayes risk of the geodesic James-Stein estimator for two walkers on the
//! infinite 3-regular tree.
//!
//! `theta_i` is a `k_tau2`-step lazy walk from the origin `mu` and `X_i` a
//! further `k_sigma2`-step walk from `theta_i`. Risks are reported relative to
//! the Fréchet variance `sigma^2 = E d(X_i, theta_i)^2`.

use serde::Serialize;

use super::{mean_and_se, Runner, Table1Config};
use crate::error::Result;
use crate::estimators::{geodesic_js, oracle_weight, ShrinkageSpec, Target, Variance, WeightRule};
use crate::geometry::{ProductPoint, ProductSpace};
use crate::rng::RngStream;
use crate::samplers::{lazy_walk_3regular, walk_distance_distribution};
use crate::spaces::tree::{RegularTree, TreeWord, WordPoint};

/// Reference values, rows `k_sigma2 = 1, 5, 10, 15, 20, 25, 30`,
/// columns `d(psi, mu) = 0, 1, 4, 8, 16, 32`, sample mean, oracle.
pub const TABLE1_REFERENCE: [(usize, [f64; 8]); 7] = [
    (1, [0.750, 0.766, 0.841, 0.884, 0.930, 0.964, 0.736, 0.558]),
    (5, [0.569, 0.592, 0.656, 0.728, 0.821, 0.877, 0.624, 0.305]),
    (10, [0.461, 0.463, 0.545, 0.607, 0.717, 0.825, 0.526, 0.200]),
    (15, [0.373, 0.381, 0.472, 0.538, 0.646, 0.766, 0.445, 0.160]),
    (20, [0.323, 0.335, 0.400, 0.463, 0.601, 0.730, 0.395, 0.116]),
    (25, [0.279, 0.298, 0.366, 0.434, 0.557, 0.689, 0.334, 0.084]),
    (30, [0.242, 0.258, 0.320, 0.386, 0.494, 0.647, 0.298, 0.072]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Table1Column {
    /// James-Stein towards the vertex `0...0` at this distance from `mu`.
    Distance(usize),
    /// James-Stein towards the midpoint of the two observations.
    SampleMean,
    /// `[X, mu]_t` with the Bayes-optimal fixed weight.
    Oracle,
    /// `X` itself.
    Identity,
}

impl Table1Column {
    pub fn shrink_point(&self) -> String {
        match self {
            Table1Column::Distance(d) => format!("d={d}"),
            Table1Column::SampleMean => "xbar".into(),
            Table1Column::Oracle => "mu".into(),
            Table1Column::Identity => "none".into(),
        }
    }

    pub fn estimator(&self) -> &'static str {
        match self {
            Table1Column::Distance(_) | Table1Column::SampleMean => "js",
            Table1Column::Oracle => "oracle",
            Table1Column::Identity => "x",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Cell {
    pub k_sigma2: usize,
    pub k_tau2: usize,
    pub column: Table1Column,
    /// Bayes risk divided by `sigma^2`.
    pub ratio: f64,
    pub std_error: f64,
    pub sigma2: f64,
    /// Fixed weight used by the oracle column.
    pub oracle_weight: f64,
    pub replicates: usize,
}

const GROUPS: usize = 2;

pub fn run_table1(config: &Table1Config, runner: &Runner) -> Result<Vec<Table1Cell>> {
    config.validate()?;
    let spaces = ProductSpace::uniform(RegularTree, GROUPS)?;
    let mu = ProductPoint::replicate(&WordPoint::vertex(TreeWord::origin()), GROUPS);
    let tau2 = walk_distance_distribution(config.k_tau2).second_moment();

    let mut columns: Vec<Table1Column> = config
        .distances
        .iter()
        .map(|&d| Table1Column::Distance(d))
        .collect();
    columns.extend([
        Table1Column::SampleMean,
        Table1Column::Oracle,
        Table1Column::Identity,
    ]);

    let mut cells = Vec::new();
    for (row, &k_sigma2) in config.k_sigma2.iter().enumerate() {
        let sigma2 = walk_distance_distribution(k_sigma2).second_moment();
        let rho_x2 = walk_distance_distribution(config.k_tau2 + k_sigma2).second_moment();
        let t_oracle = oracle_weight(sigma2, rho_x2, tau2)?.weight;

        let specs: Vec<Option<ShrinkageSpec<WordPoint>>> = columns
            .iter()
            .map(|c| match c {
                Table1Column::Distance(d) => Some(ShrinkageSpec::james_stein(
                    Variance::Common(sigma2),
                    Target::Fixed(ProductPoint::replicate(
                        &WordPoint::vertex(TreeWord::zeros(*d)),
                        GROUPS,
                    )),
                )),
                Table1Column::SampleMean => Some(ShrinkageSpec::james_stein(
                    Variance::Common(sigma2),
                    Target::AdaptiveSampleMean,
                )),
                Table1Column::Oracle => Some(ShrinkageSpec {
                    variance: Variance::Common(sigma2),
                    target: Target::OracleMu(mu.clone()),
                    weight: WeightRule::Fixed(t_oracle),
                }),
                Table1Column::Identity => None,
            })
            .collect();

        let tag = format!("table1/ksigma2={k_sigma2}/ktau2={}", config.k_tau2);
        let losses = runner.try_map(config.reps, |r| -> Result<Vec<f64>> {
            let mut rng = RngStream::derive(config.seed, &tag, row as u64, r as u64);
            let mut theta = Vec::with_capacity(GROUPS);
            let mut x = Vec::with_capacity(GROUPS);
            for _ in 0..GROUPS {
                let t = lazy_walk_3regular(&TreeWord::origin(), config.k_tau2, &mut rng);
                x.push(WordPoint::vertex(lazy_walk_3regular(
                    &t, k_sigma2, &mut rng,
                )));
                theta.push(WordPoint::vertex(t));
            }
            let (theta, x) = (ProductPoint(theta), ProductPoint(x));
            specs
                .iter()
                .map(|spec| match spec {
                    Some(spec) => spaces.dist2(&geodesic_js(&spaces, &x, spec)?.points, &theta),
                    None => spaces.dist2(&x, &theta),
                })
                .collect()
        })?;

        for (j, column) in columns.iter().enumerate() {
            let col: Vec<f64> = losses.iter().map(|l| l[j]).collect();
            let (mean, se) = mean_and_se(&col)?;
            cells.push(Table1Cell {
                k_sigma2,
                k_tau2: config.k_tau2,
                column: *column,
                ratio: mean / sigma2,
                std_error: se / sigma2,
                sigma2,
                oracle_weight: t_oracle,
                replicates: config.reps,
            });
        }
    }
    Ok(cells)
}

/// Published value for a cell, if it is one of the tabulated ones.
pub fn reference_value(k_sigma2: usize, k_tau2: usize, column: Table1Column) -> Option<f64> {
    if k_tau2 != 15 {
        return None;
    }
    let (_, row) = TABLE1_REFERENCE.iter().find(|(k, _)| *k == k_sigma2)?;
    let idx = match column {
        Table1Column::Distance(d) => [0, 1, 4, 8, 16, 32].iter().position(|&x| x == d)?,
        Table1Column::SampleMean => 6,
        Table1Column::Oracle => 7,
        Table1Column::Identity => return None,
    };
    Some(row[idx])
}

/// Plain-text table with one row per `k_sigma2`, the reference value in
/// brackets where one exists.
pub fn format_table(cells: &[Table1Cell]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let mut rows: Vec<usize> = cells.iter().map(|c| c.k_sigma2).collect();
    rows.dedup();
    for k in rows {
        let row: Vec<&Table1Cell> = cells.iter().filter(|c| c.k_sigma2 == k).collect();
        if out.is_empty() {
            let header: Vec<String> = row.iter().map(|c| c.column.shrink_point()).collect();
            let _ = writeln!(
                out,
                "{:>12} {}",
                "ksigma2/ktau2",
                header
                    .iter()
                    .map(|h| format!("{h:>16}"))
                    .collect::<String>()
            );
        }
        let _ = write!(out, "{:>12}  ", format!("{}/{}", k, row[0].k_tau2));
        for c in row {
            let text = match reference_value(c.k_sigma2, c.k_tau2, c.column) {
                Some(r) => format!("{:.3} [{:.3}]", c.ratio, r),
                None => format!("{:.3}", c.ratio),
            };
            let _ = write!(out, "{text:>16}");
        }
        out.push('\n');
    }
    out
}
