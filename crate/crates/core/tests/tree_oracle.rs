//! Tree distances and Fréchet means against an independent all-pairs
//! shortest-path oracle on random trees.

use rand::Rng;

use geoshrink::geometry::WeightedDataset;
use geoshrink::rng::RngStream;
use geoshrink::spaces::tree::{tree_distance, tree_frechet_mean, TreePoint, WeightedTree};
use geoshrink::validate::{random_tree, random_tree_point};

/// Floyd-Warshall vertex distances plus edge splitting for interior points.
struct PathOracle {
    tree: WeightedTree,
    d: Vec<Vec<f64>>,
}

impl PathOracle {
    fn new(tree: &WeightedTree) -> Self {
        let n = tree.n_vertices();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for e in tree.edges() {
            d[e.u][e.v] = e.weight;
            d[e.v][e.u] = e.weight;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        PathOracle {
            tree: tree.clone(),
            d,
        }
    }

    /// `(vertex, distance to it)` for the endpoints a point can leave through.
    fn exits(&self, p: &TreePoint) -> Vec<(usize, f64)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, 0.0)],
            TreePoint::Edge { edge, offset } => {
                let e = self.tree.edges()[edge];
                vec![(e.u, offset), (e.v, e.weight - offset)]
            }
        }
    }

    fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if let (TreePoint::Edge { edge: a, offset: s }, TreePoint::Edge { edge: b, offset: t }) =
            (p, q)
        {
            if a == b {
                return (s - t).abs();
            }
        }
        let mut best = f64::INFINITY;
        for (u, du) in self.exits(p) {
            for (v, dv) in self.exits(q) {
                best = best.min(du + self.d[u][v] + dv);
            }
        }
        best
    }

    fn functional(&self, data: &WeightedDataset<TreePoint>, z: &TreePoint) -> f64 {
        data.iter()
            .map(|(p, w)| w * self.distance(p, z).powi(2))
            .sum()
    }
}

#[test]
fn distances_match_shortest_paths() {
    let mut rng = RngStream::new(100, 0);
    for _ in 0..200 {
        let tree = random_tree(&mut rng, 30);
        let oracle = PathOracle::new(&tree);
        for _ in 0..50 {
            let p = random_tree_point(&mut rng, &tree);
            let q = random_tree_point(&mut rng, &tree);
            let got = tree_distance(&tree, &p, &q).unwrap();
            let want = oracle.distance(&p, &q);
            assert!(
                (got - want).abs() <= 1e-12 * (1.0 + want),
                "{p:?} {q:?}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn frechet_mean_minimises_oracle_functional() {
    let mut rng = RngStream::new(101, 0);
    let step = 0.01;
    for case in 0..200 {
        let tree = random_tree(&mut rng, 30);
        let oracle = PathOracle::new(&tree);
        let m = rng.random_range(1..=10);
        let points: Vec<TreePoint> = (0..m).map(|_| random_tree_point(&mut rng, &tree)).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
        let data = WeightedDataset::new(points, weights).unwrap();
        let mean = tree_frechet_mean(&tree, &data).unwrap();
        let value = oracle.functional(&data, &mean);
        let (argmin, best) = tree
            .grid(step)
            .into_iter()
            .map(|g| {
                let f = oracle.functional(&data, &g);
                (g, f)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(value <= best + 1e-4, "case {case}: {value} > {best}");
        assert!(
            oracle.distance(&mean, &argmin) <= step * (1.0 + 1e-9),
            "case {case}: {mean:?} vs {argmin:?}"
        );
    }
}

#[test]
fn single_point_and_two_point_means() {
    let mut rng = RngStream::new(102, 0);
    for _ in 0..100 {
        let tree = random_tree(&mut rng, 30);
        let oracle = PathOracle::new(&tree);
        let p = random_tree_point(&mut rng, &tree);
        let q = random_tree_point(&mut rng, &tree);
        let single = tree_frechet_mean(&tree, &WeightedDataset::uniform(vec![p]).unwrap()).unwrap();
        assert!(oracle.distance(&single, &p) <= 1e-9);
        // Equal weights: the midpoint of the geodesic.
        let mid = tree_frechet_mean(&tree, &WeightedDataset::uniform(vec![p, q]).unwrap()).unwrap();
        let half = oracle.distance(&p, &q) / 2.0;
        assert!((oracle.distance(&mid, &p) - half).abs() <= 1e-9);
        assert!((oracle.distance(&mid, &q) - half).abs() <= 1e-9);
    }
}
