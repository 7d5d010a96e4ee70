//! Two counterexamples: the tower rule fails on a tripod, and geodesic
//! shrinkage inflates risk on the circle.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;

use super::output::CsvRow;
use super::{mean_and_se, CircleConfig, Runner};
use crate::error::Result;
use crate::geometry::WeightedDataset;
use crate::rng::RngStream;
use crate::spaces::circle::{circle_distance, circle_interpolate, CirclePoint};
use crate::spaces::tree::{tree_distance, tree_frechet_mean, tripod, TreePoint, WeightedTree};

const EXACT: f64 = 1e-9;

/// Quantities computed on the tripod with arms `A: 1`, `B: 2`, `C: 1`.
#[derive(Clone, Debug)]
pub struct TripodReport {
    pub d_ab: f64,
    pub d_ac: f64,
    /// Fréchet mean of `X ~ Unif{A, B, C}`.
    pub mean_x: TreePoint,
    /// Law of `E(X | Y)` where `Y` indicates `X = B`.
    pub conditional_law: Vec<(TreePoint, f64)>,
    /// Fréchet mean of that law.
    pub mean_of_conditional: TreePoint,
    /// Distance from the centre of `mean_of_conditional`, measured along B's arm.
    pub offset_toward_b: f64,
    /// `d(E X, E(E(X | Y)))`.
    pub gap: f64,
}

fn vertex(v: usize) -> TreePoint {
    TreePoint::Vertex(v)
}

fn on_arm(tree: &WeightedTree, p: &TreePoint, arm: usize) -> bool {
    match tree.canonicalize(*p) {
        TreePoint::Vertex(v) => v == arm || v == tripod::CENTER,
        TreePoint::Edge { edge, .. } => {
            let e = tree.edges()[edge];
            (e.u == arm || e.v == arm) && (e.u == tripod::CENTER || e.v == tripod::CENTER)
        }
    }
}

pub fn demo_tripod() -> Result<TripodReport> {
    let tree = WeightedTree::tripod();
    let (a, b, c, center) = (
        vertex(tripod::A),
        vertex(tripod::B),
        vertex(tripod::C),
        vertex(tripod::CENTER),
    );
    let d_ab = tree_distance(&tree, &a, &b)?;
    let d_ac = tree_distance(&tree, &a, &c)?;
    let mean_x = tree_frechet_mean(&tree, &WeightedDataset::uniform(vec![a, b, c])?)?;

    // Y = 0 on {A, C}, Y = 1 on {B}.
    let given_0 = tree_frechet_mean(&tree, &WeightedDataset::uniform(vec![a, c])?)?;
    let given_1 = tree_frechet_mean(&tree, &WeightedDataset::uniform(vec![b])?)?;
    let conditional_law = vec![(given_0, 2.0 / 3.0), (given_1, 1.0 / 3.0)];
    let mean_of_conditional = tree_frechet_mean(
        &tree,
        &WeightedDataset::new(vec![given_0, given_1], vec![2.0 / 3.0, 1.0 / 3.0])?,
    )?;
    let offset = tree_distance(&tree, &center, &mean_of_conditional)?;
    let offset_toward_b = if on_arm(&tree, &mean_of_conditional, tripod::B) {
        offset
    } else {
        -offset
    };
    let gap = tree_distance(&tree, &mean_x, &mean_of_conditional)?;
    Ok(TripodReport {
        d_ab,
        d_ac,
        mean_x,
        conditional_law,
        mean_of_conditional,
        offset_toward_b,
        gap,
    })
}

impl TripodReport {
    pub fn mean_x_is_center(&self) -> bool {
        WeightedTree::tripod().canonicalize(self.mean_x) == vertex(tripod::CENTER)
    }

    pub fn passed(&self) -> bool {
        let tree = WeightedTree::tripod();
        let law_ok = self.conditional_law.len() == 2
            && tree.canonicalize(self.conditional_law[0].0) == vertex(tripod::CENTER)
            && tree.canonicalize(self.conditional_law[1].0) == vertex(tripod::B);
        (self.d_ab - 3.0).abs() <= EXACT
            && (self.d_ac - 2.0).abs() <= EXACT
            && self.mean_x_is_center()
            && law_ok
            && (self.offset_toward_b - 2.0 / 3.0).abs() <= EXACT
            && (self.gap - 2.0 / 3.0).abs() <= EXACT
    }

    pub fn rows(&self, experiment: &str) -> Vec<CsvRow> {
        let row = |label: &str, value: f64| CsvRow {
            experiment: experiment.into(),
            n: 1,
            alpha_or_ksigma: 0.0,
            shrink_point: "none".into(),
            estimator: label.into(),
            mean_loss: value,
            std_error: 0.0,
            replicates: 0,
            seed: 0,
        };
        vec![
            row("d_AB", self.d_ab),
            row("d_AC", self.d_ac),
            row("offset_toward_B", self.offset_toward_b),
            row("tower_gap", self.gap),
        ]
    }
}

fn describe(p: &TreePoint) -> String {
    match WeightedTree::tripod().canonicalize(*p) {
        TreePoint::Vertex(tripod::CENTER) => "center".into(),
        TreePoint::Vertex(tripod::A) => "A".into(),
        TreePoint::Vertex(tripod::B) => "B".into(),
        TreePoint::Vertex(tripod::C) => "C".into(),
        other => format!("{other:?}"),
    }
}

impl fmt::Display for TripodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tripod with arms A=1, B=2, C=1")?;
        writeln!(f, "d(A,B) = {}", self.d_ab)?;
        writeln!(f, "d(A,C) = {}", self.d_ac)?;
        writeln!(f, "E X = {}", describe(&self.mean_x))?;
        let law: Vec<String> = self
            .conditional_law
            .iter()
            .map(|(p, w)| format!("{}: {w:.6}", describe(p)))
            .collect();
        writeln!(f, "law of E(X|Y) = {{{}}}", law.join(", "))?;
        writeln!(
            f,
            "E(E(X|Y)) = point on arm B at distance {:.6} from center",
            self.offset_toward_b
        )?;
        writeln!(f, "gap d(E X, E(E(X|Y))) = {:.6}", self.gap)?;
        write!(
            f,
            "tower rule {}",
            if self.gap > EXACT { "fails" } else { "holds" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleRow {
    pub psi_angle: f64,
    pub t: f64,
    pub mean_loss: f64,
    pub std_error: f64,
}

/// Risk of `[X, psi]_t` for `X` uniform on the arc `[-π/2, π/2]` around the
/// mean at angle 0, for the configured `psi` and for `psi` at the mean.
#[derive(Clone, Debug)]
pub struct CircleReport {
    pub reps: usize,
    pub rows: Vec<CircleRow>,
    pub control_rows: Vec<CircleRow>,
}

fn circle_risks(
    config: &CircleConfig,
    runner: &Runner,
    psi_angle: f64,
    tag: &str,
) -> Result<Vec<CircleRow>> {
    let psi = CirclePoint::new(psi_angle);
    let theta = CirclePoint::new(0.0);
    // Same draws for every t.
    let losses: Vec<Vec<f64>> = runner.map(config.reps, |r| {
        let mut rng = RngStream::derive(config.seed, tag, 0, r as u64);
        let x = CirclePoint::new(rng.random_range(-PI / 2.0..=PI / 2.0));
        config
            .t_grid
            .iter()
            .map(|&t| {
                let d = circle_distance(circle_interpolate(x, psi, t).0, theta);
                d * d
            })
            .collect()
    });
    config
        .t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let col: Vec<f64> = losses.iter().map(|l| l[i]).collect();
            let (mean_loss, std_error) = mean_and_se(&col)?;
            Ok(CircleRow {
                psi_angle,
                t,
                mean_loss,
                std_error,
            })
        })
        .collect()
}

pub fn demo_circle(config: &CircleConfig, runner: &Runner) -> Result<CircleReport> {
    config.validate()?;
    let rows = circle_risks(config, runner, config.psi_angle, "demo_circle")?;
    let control_rows = circle_risks(config, runner, 0.0, "demo_circle")?;
    Ok(CircleReport {
        reps: config.reps,
        rows,
        control_rows,
    })
}

impl CircleReport {
    fn baseline(rows: &[CircleRow]) -> Option<&CircleRow> {
        rows.iter().find(|r| r.t == 0.0)
    }

    /// Every `t > 0` has risk above `risk(0)` by more than four standard errors.
    pub fn inflation_holds(&self) -> bool {
        let Some(base) = Self::baseline(&self.rows) else {
            return false;
        };
        self.rows
            .iter()
            .filter(|r| r.t > 0.0)
            .all(|r| r.mean_loss > base.mean_loss + 4.0 * r.std_error)
    }

    /// Risk at `t = 0` is the uniform variance `π²/12`.
    pub fn baseline_matches(&self) -> bool {
        Self::baseline(&self.rows)
            .is_some_and(|b| (b.mean_loss - PI * PI / 12.0).abs() <= 4.0 * b.std_error)
    }

    /// With `psi` at the mean, the smallest positive `t` lowers the risk.
    pub fn control_improves(&self) -> bool {
        let Some(base) = Self::baseline(&self.control_rows) else {
            return false;
        };
        self.control_rows
            .iter()
            .filter(|r| r.t > 0.0)
            .min_by(|a, b| a.t.total_cmp(&b.t))
            .is_some_and(|r| r.mean_loss < base.mean_loss)
    }

    pub fn passed(&self) -> bool {
        self.inflation_holds() && self.baseline_matches() && self.control_improves()
    }

    pub fn rows(&self, experiment: &str, seed: u64) -> Vec<CsvRow> {
        self.rows
            .iter()
            .chain(&self.control_rows)
            .map(|r| CsvRow {
                experiment: experiment.into(),
                n: 1,
                alpha_or_ksigma: r.t,
                shrink_point: format!("angle={}", r.psi_angle),
                estimator: "geodesic_shrink".into(),
                mean_loss: r.mean_loss,
                std_error: r.std_error,
                replicates: self.reps,
                seed,
            })
            .collect()
    }
}

impl fmt::Display for CircleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "X uniform on [-pi/2, pi/2], theta = 0, {} replicates",
            self.reps
        )?;
        for (label, rows) in [
            ("psi = configured", &self.rows),
            ("psi = 0 (control)", &self.control_rows),
        ] {
            writeln!(f, "{label}")?;
            writeln!(f, "  {:>5}  {:>10}  {:>10}", "t", "risk", "se")?;
            for r in rows {
                writeln!(
                    f,
                    "  {:>5.2}  {:>10.6}  {:>10.6}",
                    r.t, r.mean_loss, r.std_error
                )?;
            }
        }
        writeln!(f, "risk(0) = pi^2/12: {}", self.baseline_matches())?;
        writeln!(
            f,
            "risk(t) > risk(0) + 4 se for all t > 0: {}",
            self.inflation_holds()
        )?;
        write!(
            f,
            "control improves at smallest t: {}",
            self.control_improves()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripod_report_values() {
        let r = demo_tripod().unwrap();
        assert_eq!(r.d_ab, 3.0);
        assert_eq!(r.d_ac, 2.0);
        assert!(r.mean_x_is_center());
        assert!((r.gap - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.offset_toward_b - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.passed());
        assert!(r.to_string().contains("gap"));
    }

    #[test]
    fn circle_small_run() {
        let config = CircleConfig {
            reps: 4000,
            ..CircleConfig::default()
        };
        let runner = Runner::new(1).unwrap();
        let r = demo_circle(&config, &runner).unwrap();
        assert!(r.inflation_holds());
        assert!(r.control_improves());
        // Antipodal shrinkage moves every draw away from 0.
        for w in r.rows.windows(2) {
            assert!(w[1].mean_loss > w[0].mean_loss);
        }
    }
}
