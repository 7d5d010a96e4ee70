//! Randomised property suites for geodesic spaces.
//!
//! Each suite draws cases from a seeded stream, checks one named invariant per
//! case, and records how many cases violated it and by how much. Suites are
//! generic over [`GeodesicSpace`] so a faulty implementation can be checked
//! the same way as the real ones.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{GeoError, Result};
use crate::geometry::{
    brute_force_frechet_mean, cat0_slack, frechet_functional, pair_convexity_gap,
};
use crate::geometry::{GeodesicSpace, WeightedDataset};
use crate::harness::{render_csv, ExperimentSpec, Runner, Table1Config};
use crate::rng::RngStream;
use crate::spaces::euclidean::{Euclidean, EuclideanPoint};
use crate::spaces::spd::{Spd, SpdPoint, SymMatrix};
use crate::spaces::tree::{
    tree_distance, tree_frechet_mean_traced, Edge, RegularTree, TreePoint, TreeSpace, TreeWord,
    WeightedTree, WordPoint,
};

/// Allowed CAT(0) deficit.
pub const CAT0_TOL: f64 = 1e-9;
/// Allowed `|slack|` in flat spaces.
pub const FLAT_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-4;

/// Outcome of one invariant over all cases.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: String,
    pub invariant: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest violation seen, 0 if none.
    pub worst: f64,
    pub first_failure: Option<usize>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(
                f,
                "ok    {}/{} ({} cases)",
                self.suite, self.invariant, self.cases
            )
        } else {
            write!(
                f,
                "FAIL  {}/{}: {} of {} cases violated, worst {:.3e}, first at case {}",
                self.suite,
                self.invariant,
                self.failures,
                self.cases,
                self.worst,
                self.first_failure.unwrap_or(0)
            )
        }
    }
}

/// Accumulates per-case violations (`excess > 0` means violated).
struct Tally {
    names: Vec<&'static str>,
    failures: Vec<usize>,
    worst: Vec<f64>,
    first: Vec<Option<usize>>,
}

impl Tally {
    fn new(names: &[&'static str]) -> Self {
        Tally {
            names: names.to_vec(),
            failures: vec![0; names.len()],
            worst: vec![0.0; names.len()],
            first: vec![None; names.len()],
        }
    }

    fn add(&mut self, case: usize, excesses: &[f64]) {
        for (i, &e) in excesses.iter().enumerate() {
            // NaN counts as a violation.
            if !(e <= 0.0) {
                self.failures[i] += 1;
                self.worst[i] = if e.is_nan() {
                    f64::NAN
                } else {
                    self.worst[i].max(e)
                };
                self.first[i].get_or_insert(case);
            }
        }
    }

    fn finish(self, suite: &str, cases: usize) -> Vec<Check> {
        (0..self.names.len())
            .map(|i| Check {
                suite: suite.to_string(),
                invariant: self.names[i],
                cases,
                failures: self.failures[i],
                worst: self.worst[i],
                first_failure: self.first[i],
            })
            .collect()
    }
}

const GEOMETRY_INVARIANTS: [&str; 8] = [
    "identity",
    "symmetry",
    "triangle",
    "geodesic_endpoints",
    "geodesic_speed",
    "cat0",
    "cat0_equality",
    "pair_convexity",
];

/// Metric axioms, constant-speed geodesics, the CAT(0) inequality (Hadamard
/// spaces), CAT(0) equality (`flat`), and joint convexity of the distance.
pub fn check_geometry<S, G>(
    suite: &str,
    space: &S,
    flat: bool,
    gen: G,
    cases: usize,
    seed: u64,
    runner: &Runner,
) -> Vec<Check>
where
    S: GeodesicSpace,
    G: Fn(&mut RngStream) -> S::Point + Sync,
{
    let tol = space.tolerance();
    let hadamard = space.is_hadamard();
    let per_case: Vec<[f64; 8]> = runner.map(cases, |c| {
        let mut rng = RngStream::derive(seed, suite, 0, c as u64);
        let (x, y, z, w) = (gen(&mut rng), gen(&mut rng), gen(&mut rng), gen(&mut rng));
        let t: f64 = rng.random_range(0.0..=1.0);
        let s: f64 = rng.random_range(0.0..=1.0);
        let dxy = space.distance(&x, &y);
        let dyx = space.distance(&y, &x);
        let dxz = space.distance(&x, &z);
        let dyz = space.distance(&y, &z);
        let scale = dxy.max(dxz).max(dyz);

        let identity = space.distance(&x, &x) - tol.allowance(0.0);
        let nonneg = -dxy.min(dyx);
        let symmetry = (dxy - dyx).abs() - tol.allowance(dxy);
        let triangle = dxz - dxy - dyz - tol.allowance(scale);
        let g0 = space.interpolate(&x, &y, 0.0);
        let g1 = space.interpolate(&x, &y, 1.0);
        let endpoints = space.distance(&g0, &x).max(space.distance(&g1, &y)) - tol.allowance(dxy);
        let gs = space.interpolate(&x, &y, s);
        let gt = space.interpolate(&x, &y, t);
        let speed = (space.distance(&gs, &gt) - (t - s).abs() * dxy).abs() - tol.allowance(dxy);
        let slack = cat0_slack(space, &x, &y, &z, t).unwrap_or(f64::NAN);
        let cat0 = if hadamard { -slack - CAT0_TOL } else { 0.0 };
        let equality = if flat { slack.abs() - FLAT_TOL } else { 0.0 };
        let convex = if hadamard {
            -pair_convexity_gap(space, &x, &y, &w, &z, t).unwrap_or(f64::NAN) - CAT0_TOL
        } else {
            0.0
        };
        [
            identity.max(nonneg),
            symmetry,
            triangle,
            endpoints,
            speed,
            cat0,
            equality,
            convex,
        ]
    });
    let mut tally = Tally::new(&GEOMETRY_INVARIANTS);
    for (c, e) in per_case.iter().enumerate() {
        tally.add(c, e);
    }
    let mut checks = tally.finish(suite, cases);
    if !hadamard {
        checks.retain(|c| c.invariant != "cat0" && c.invariant != "pair_convexity");
    }
    if !flat {
        checks.retain(|c| c.invariant != "cat0_equality");
    }
    checks
}

pub fn random_euclidean(rng: &mut RngStream, dim: usize) -> EuclideanPoint {
    EuclideanPoint((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
}

/// `exp S` for a symmetric `S` with entries in `[-2, 2]`.
pub fn random_spd(rng: &mut RngStream, k: usize) -> SpdPoint {
    let mut entries = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = rng.random_range(-2.0..2.0);
            entries[i * k + j] = v;
            entries[j * k + i] = v;
        }
    }
    SpdPoint::from_log(SymMatrix::from_row_slice(k, &entries).expect("symmetric by construction"))
}

/// A tree on `2..=max_vertices` vertices with random shape, edge lengths in
/// `[0.1, 3]`, edge orientation and edge order.
pub fn random_tree(rng: &mut RngStream, max_vertices: usize) -> WeightedTree {
    let n = rng.random_range(2..=max_vertices.max(2));
    let mut edges: Vec<Edge> = (1..n)
        .map(|v| {
            let p = rng.random_range(0..v);
            let w = rng.random_range(0.1..3.0);
            if rng.random_bool(0.5) {
                Edge { u: p, v, weight: w }
            } else {
                Edge {
                    u: v,
                    v: p,
                    weight: w,
                }
            }
        })
        .collect();
    edges.shuffle(rng);
    WeightedTree::new(n, edges).expect("random tree is valid")
}

/// A vertex with probability 1/2, otherwise a uniform interior edge point.
pub fn random_tree_point(rng: &mut RngStream, tree: &WeightedTree) -> TreePoint {
    if rng.random_bool(0.5) {
        TreePoint::Vertex(rng.random_range(0..tree.n_vertices()))
    } else {
        let edge = rng.random_range(0..tree.edges().len());
        let w = tree.edges()[edge].weight;
        TreePoint::Edge {
            edge,
            offset: rng.random_range(0.0..w),
        }
    }
}

pub fn random_word_point(rng: &mut RngStream, max_len: usize) -> WordPoint {
    let len = rng.random_range(0..=max_len);
    if len == 0 {
        return WordPoint::vertex(TreeWord::origin());
    }
    let mut letters = vec![rng.random_range(0..3u8)];
    letters.extend((1..len).map(|_| rng.random_range(0..2u8)));
    let word = TreeWord::new(letters).expect("valid letters");
    let up = if rng.random_bool(0.3) {
        0.0
    } else {
        rng.random_range(0.0..1.0)
    };
    WordPoint::new(word, up).expect("offset below one")
}

/// The descent algorithm against a brute-force grid minimiser on random
/// trees: functional value, distance between minimisers, and vertex visits.
pub fn check_tree_mean_oracle(
    instances: usize,
    max_vertices: usize,
    step: f64,
    seed: u64,
    runner: &Runner,
) -> Vec<Check> {
    let suite = "tree_mean_oracle";
    let per_case: Vec<[f64; 3]> = runner.map(instances, |c| {
        let mut rng = RngStream::derive(seed, suite, 0, c as u64);
        let tree = random_tree(&mut rng, max_vertices);
        let m = rng.random_range(1..=10);
        let points: Vec<TreePoint> = (0..m).map(|_| random_tree_point(&mut rng, &tree)).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
        let data = WeightedDataset::new(points, weights).expect("positive weights");
        let space = TreeSpace::new(tree.clone());
        let trace = tree_frechet_mean_traced(&tree, &data).expect("valid data");
        let grid = tree.grid(step);
        let (argmin, best) = brute_force_frechet_mean(&space, &data, &grid).expect("nonempty grid");
        let value = frechet_functional(&space, &data, &trace.mean).expect("nonempty data");
        let gap = value - best - ORACLE_TOL;
        let dist =
            tree_distance(&tree, &trace.mean, &argmin).unwrap_or(f64::NAN) - step * (1.0 + 1e-9);
        let visits = trace.visits as f64 - tree.n_vertices() as f64;
        [gap, dist, visits]
    });
    let mut tally = Tally::new(&["functional_value", "argmin_distance", "vertex_visits"]);
    for (c, e) in per_case.iter().enumerate() {
        tally.add(c, e);
    }
    tally.finish(suite, instances)
}

/// Renders the same small experiment with `runner` and with one worker and
/// compares the CSV text byte for byte.
pub fn check_determinism(seed: u64, runner: &Runner) -> Result<Check> {
    let spec = ExperimentSpec::Table1(Table1Config {
        k_sigma2: vec![5],
        k_tau2: 15,
        distances: vec![0, 4],
        reps: 500,
        seed,
    });
    let a = render_csv(&spec.run(runner)?)?;
    let b = render_csv(&spec.run(&Runner::new(1)?)?)?;
    let same = a == b;
    Ok(Check {
        suite: format!("determinism(workers={} vs 1)", runner.workers()),
        invariant: "identical_csv",
        cases: 1,
        failures: usize::from(!same),
        worst: if same { 0.0 } else { 1.0 },
        first_failure: (!same).then_some(0),
    })
}

/// Which suites to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceFilter {
    All,
    Euclidean,
    Spd,
    Tree,
}

impl std::str::FromStr for SpaceFilter {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(SpaceFilter::All),
            "euclidean" => Ok(SpaceFilter::Euclidean),
            "spd" => Ok(SpaceFilter::Spd),
            "tree" => Ok(SpaceFilter::Tree),
            _ => Err(GeoError::domain(format!(
                "unknown space {s:?}; expected all, euclidean, spd or tree"
            ))),
        }
    }
}

/// Euclidean space with a metric that is deliberately not symmetric, used to
/// confirm that the suites catch a broken implementation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymmetricEuclidean(pub Euclidean);

impl GeodesicSpace for AsymmetricEuclidean {
    type Point = EuclideanPoint;

    fn distance(&self, x: &EuclideanPoint, y: &EuclideanPoint) -> f64 {
        let d = self.0.distance(x, y);
        if x.0[0] > y.0[0] {
            1.01 * d
        } else {
            d
        }
    }

    fn interpolate(&self, x: &EuclideanPoint, y: &EuclideanPoint, t: f64) -> EuclideanPoint {
        self.0.interpolate(x, y, t)
    }
}

#[derive(Clone, Debug)]
pub struct ValidateConfig {
    pub filter: SpaceFilter,
    pub cases: usize,
    pub oracle_instances: usize,
    pub seed: u64,
    /// Adds the suite for [`AsymmetricEuclidean`].
    pub inject_asymmetry: bool,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            filter: SpaceFilter::All,
            cases: 100_000,
            oracle_instances: 200,
            seed: 7,
            inject_asymmetry: false,
        }
    }
}

pub fn run_validation(config: &ValidateConfig, runner: &Runner) -> Result<Vec<Check>> {
    if config.cases == 0 {
        return Err(GeoError::domain("cases must be at least 1"));
    }
    let f = config.filter;
    let (cases, seed) = (config.cases, config.seed);
    let mut checks = Vec::new();
    if matches!(f, SpaceFilter::All | SpaceFilter::Euclidean) {
        let e = Euclidean::new(3);
        checks.extend(check_geometry(
            "euclidean(3)",
            &e,
            true,
            |r| random_euclidean(r, 3),
            cases,
            seed,
            runner,
        ));
    }
    if config.inject_asymmetry {
        let e = AsymmetricEuclidean(Euclidean::new(3));
        checks.extend(check_geometry(
            "asymmetric_euclidean(3)",
            &e,
            true,
            |r| random_euclidean(r, 3),
            cases,
            seed,
            runner,
        ));
    }
    if matches!(f, SpaceFilter::All | SpaceFilter::Spd) {
        checks.extend(check_geometry(
            "spd(3)",
            &Spd::new(3),
            true,
            |r| random_spd(r, 3),
            cases,
            seed,
            runner,
        ));
    }
    if matches!(f, SpaceFilter::All | SpaceFilter::Tree) {
        let mut rng = RngStream::derive(seed, "validate/tree_shape", 0, 0);
        let tree = random_tree(&mut rng, 30);
        let space = TreeSpace::new(tree.clone());
        checks.extend(check_geometry(
            "weighted_tree",
            &space,
            false,
            |r| random_tree_point(r, &tree),
            cases,
            seed,
            runner,
        ));
        checks.extend(check_geometry(
            "regular_tree",
            &RegularTree,
            false,
            |r| random_word_point(r, 8),
            cases,
            seed,
            runner,
        ));
        checks.extend(check_tree_mean_oracle(
            config.oracle_instances,
            30,
            0.01,
            seed,
            runner,
        ));
    }
    if f == SpaceFilter::All {
        checks.push(check_determinism(seed, runner)?);
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn runner() -> Runner {
        Runner::new(1).unwrap()
    }

    #[test]
    fn real_spaces_pass_small_suites() {
        let config = ValidateConfig {
            cases: 2000,
            oracle_instances: 20,
            ..ValidateConfig::default()
        };
        let checks = run_validation(&config, &runner()).unwrap();
        for c in &checks {
            assert!(c.passed(), "{c}");
        }
        assert!(checks
            .iter()
            .any(|c| c.suite == "spd(3)" && c.invariant == "cat0_equality"));
        assert!(!checks
            .iter()
            .any(|c| c.suite == "weighted_tree" && c.invariant == "cat0_equality"));
    }

    #[test]
    fn injected_asymmetry_is_named() {
        let config = ValidateConfig {
            filter: SpaceFilter::Euclidean,
            cases: 500,
            inject_asymmetry: true,
            ..ValidateConfig::default()
        };
        let checks = run_validation(&config, &runner()).unwrap();
        let bad: Vec<&Check> = checks.iter().filter(|c| !c.passed()).collect();
        assert!(bad
            .iter()
            .any(|c| c.invariant == "symmetry" && c.suite.starts_with("asymmetric")));
        assert!(bad.iter().all(|c| c.suite.starts_with("asymmetric")));
        assert!(bad[0].to_string().starts_with("FAIL"));
    }

    #[test]
    fn filter_restricts_suites() {
        let config = ValidateConfig {
            filter: SpaceFilter::Tree,
            cases: 100,
            oracle_instances: 5,
            ..ValidateConfig::default()
        };
        let checks = run_validation(&config, &runner()).unwrap();
        assert!(checks.iter().all(|c| c.suite.contains("tree")));
        assert!("hyperbolic".parse::<SpaceFilter>().is_err());
    }

    #[test]
    fn random_trees_are_valid_and_varied() {
        let mut rng = RngStream::new(1, 1);
        let sizes: Vec<usize> = (0..50)
            .map(|_| random_tree(&mut rng, 30).n_vertices())
            .collect();
        assert!(sizes.iter().all(|n| (2..=30).contains(n)));
        assert!(sizes.iter().any(|n| *n > 15));
    }
}
