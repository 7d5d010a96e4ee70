use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rooted::{self, Anchored, Rooted, SNAP};
use crate::error::{GeoError, Result};
use crate::geometry::{check_unit_interval, GeodesicSpace, SampleMean, Tolerance, WeightedDataset};

/// An undirected edge `(u, v)` with positive length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, weight): (usize, usize, f64)) -> Self {
        Edge { u, v, weight }
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.u, e.v, e.weight)
    }
}

/// A point of a metric tree: a vertex, or a point inside an edge at
/// distance `offset` from the edge's `u` endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreePoint {
    Vertex(usize),
    Edge { edge: usize, offset: f64 },
}

/// A finite tree with positive edge lengths, rooted at vertex 0.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    n_vertices: usize,
    edges: Vec<Edge>,
    /// Incident `(edge, neighbour)` pairs, sorted by edge index.
    adjacency: Vec<Vec<(usize, usize)>>,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<usize>,
    root_dist: Vec<f64>,
    max_degree: usize,
}

impl WeightedTree {
    /// Builds a tree on vertices `0..n_vertices`; rejects cycles, disconnected
    /// graphs and non-positive lengths.
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(GeoError::InvalidTree("no vertices".into()));
        }
        if edges.len() + 1 != n_vertices {
            return Err(GeoError::InvalidTree(format!(
                "{} vertices need {} edges, got {}",
                n_vertices,
                n_vertices - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n_vertices || e.v >= n_vertices {
                return Err(GeoError::InvalidTree(format!(
                    "edge {i} has an unknown endpoint"
                )));
            }
            if e.u == e.v {
                return Err(GeoError::InvalidTree(format!("edge {i} is a loop")));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GeoError::InvalidTree(format!(
                    "edge {i} has non-positive length"
                )));
            }
            adjacency[e.u].push((i, e.v));
            adjacency[e.v].push((i, e.u));
        }

        let mut parent = vec![None; n_vertices];
        let mut parent_edge = vec![None; n_vertices];
        let mut depth = vec![0; n_vertices];
        let mut root_dist = vec![0.0; n_vertices];
        let mut seen = vec![false; n_vertices];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adjacency[v] {
                if Some(e) == parent_edge[v] {
                    continue;
                }
                if seen[w] {
                    return Err(GeoError::InvalidTree("graph has a cycle".into()));
                }
                seen[w] = true;
                reached += 1;
                parent[w] = Some(v);
                parent_edge[w] = Some(e);
                depth[w] = depth[v] + 1;
                root_dist[w] = root_dist[v] + edges[e].weight;
                queue.push_back(w);
            }
        }
        if reached != n_vertices {
            return Err(GeoError::InvalidTree("graph is disconnected".into()));
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(WeightedTree {
            n_vertices,
            edges,
            adjacency,
            parent,
            parent_edge,
            depth,
            root_dist,
            max_degree,
        })
    }

    /// Vertex count inferred from the largest endpoint.
    pub fn from_edges(edges: Vec<Edge>) -> Result<Self> {
        let n = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(1);
        Self::new(n, edges)
    }

    /// A single vertex.
    pub fn singleton() -> Self {
        Self::new(1, Vec::new()).expect("singleton tree is valid")
    }

    /// Centre 0 with arms of length 1 to A = 1, 2 to B = 2 and 1 to C = 3.
    pub fn tripod() -> Self {
        Self::new(
            4,
            vec![(0, 1, 1.0).into(), (0, 2, 2.0).into(), (0, 3, 1.0).into()],
        )
        .expect("tripod is valid")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn min_edge_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.weight).reduce(f64::min)
    }

    /// `(edge, neighbour)` pairs at `v`, by increasing edge index.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn validate_point(&self, p: &TreePoint) -> Result<()> {
        match *p {
            TreePoint::Vertex(v) if v < self.n_vertices => Ok(()),
            TreePoint::Vertex(v) => Err(GeoError::domain(format!("vertex {v} is not in the tree"))),
            TreePoint::Edge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| GeoError::domain(format!("edge {edge} is not in the tree")))?;
                if offset.is_finite() && offset >= 0.0 && offset <= e.weight {
                    Ok(())
                } else {
                    Err(GeoError::domain(format!(
                        "offset {offset} outside edge {edge}"
                    )))
                }
            }
        }
    }

    /// Replaces edge points at (or within rounding of) an endpoint by that vertex.
    pub fn canonicalize(&self, p: TreePoint) -> TreePoint {
        match p {
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                let snap = SNAP * e.weight.max(1.0);
                if offset <= snap {
                    TreePoint::Vertex(e.u)
                } else if offset >= e.weight - snap {
                    TreePoint::Vertex(e.v)
                } else {
                    p
                }
            }
            v => v,
        }
    }

    /// The endpoint of `edge` further from the root.
    fn child_of_edge(&self, edge: usize) -> usize {
        let e = self.edges[edge];
        if self.parent_edge[e.v] == Some(edge) {
            e.v
        } else {
            e.u
        }
    }

    pub(crate) fn anchor(&self, p: &TreePoint) -> Anchored<usize> {
        match self.canonicalize(*p) {
            TreePoint::Vertex(v) => Anchored::vertex(v),
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                let child = self.child_of_edge(edge);
                let up = if child == e.u {
                    offset
                } else {
                    e.weight - offset
                };
                Anchored { below: child, up }
            }
        }
    }

    pub(crate) fn unanchor(&self, a: &Anchored<usize>) -> TreePoint {
        if a.up <= SNAP {
            return TreePoint::Vertex(a.below);
        }
        let edge = self.parent_edge[a.below].expect("anchored point above the root");
        let e = self.edges[edge];
        let offset = if e.u == a.below {
            a.up
        } else {
            e.weight - a.up
        };
        self.canonicalize(TreePoint::Edge { edge, offset })
    }

    /// All vertices followed by interior points every `step` along each edge.
    pub fn grid(&self, step: f64) -> Vec<TreePoint> {
        let mut out: Vec<TreePoint> = (0..self.n_vertices).map(TreePoint::Vertex).collect();
        for (i, e) in self.edges.iter().enumerate() {
            let count = (e.weight / step).ceil() as usize;
            for j in 1..count {
                let offset = j as f64 * e.weight / count as f64;
                out.push(TreePoint::Edge { edge: i, offset });
            }
        }
        out
    }

    /// First edge on the path from vertex `v` to `x`, or `None` if `x` is `v`.
    fn first_edge(&self, v: usize, x: &Anchored<usize>) -> Option<usize> {
        if x.below == v {
            return if x.up > 0.0 {
                self.parent_edge[v]
            } else {
                None
            };
        }
        if self.is_ancestor(&v, &x.below) {
            let mut cur = x.below;
            while self.parent[cur] != Some(v) {
                cur = self.parent[cur].expect("walk stays below v");
            }
            return self.parent_edge[cur];
        }
        self.parent_edge[v]
    }
}

impl Rooted for WeightedTree {
    type V = usize;

    fn root_dist(&self, v: &usize) -> f64 {
        self.root_dist[*v]
    }

    fn parent(&self, v: &usize) -> Option<usize> {
        self.parent[*v]
    }

    fn is_ancestor(&self, a: &usize, b: &usize) -> bool {
        let mut cur = *b;
        while self.depth[cur] > self.depth[*a] {
            cur = self.parent[cur].expect("non-root vertex has a parent");
        }
        cur == *a
    }

    fn lca(&self, a: &usize, b: &usize) -> usize {
        let (mut x, mut y) = (*a, *b);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].expect("non-root vertex has a parent");
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("non-root vertex has a parent");
        }
        while x != y {
            x = self.parent[x].expect("non-root vertex has a parent");
            y = self.parent[y].expect("non-root vertex has a parent");
        }
        x
    }
}

/// Shortest-path distance between two points of `tree`.
pub fn tree_distance(tree: &WeightedTree, a: &TreePoint, b: &TreePoint) -> Result<f64> {
    tree.validate_point(a)?;
    tree.validate_point(b)?;
    Ok(rooted::distance(tree, &tree.anchor(a), &tree.anchor(b)))
}

/// The point at arc length `t d(a, b)` from `a` on the path to `b`.
pub fn tree_interpolate(
    tree: &WeightedTree,
    a: &TreePoint,
    b: &TreePoint,
    t: f64,
) -> Result<TreePoint> {
    check_unit_interval(t)?;
    tree.validate_point(a)?;
    tree.validate_point(b)?;
    if t == 0.0 {
        return Ok(*a);
    }
    if t == 1.0 {
        return Ok(*b);
    }
    let p = rooted::interpolate(tree, &tree.anchor(a), &tree.anchor(b), t);
    Ok(tree.unanchor(&p))
}

/// Result of [`tree_frechet_mean_traced`].
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMeanTrace {
    pub mean: TreePoint,
    /// Vertices visited by the descent, including the start.
    pub visits: usize,
}

/// Exact weighted Fréchet mean on a finite tree.
pub fn tree_frechet_mean(
    tree: &WeightedTree,
    data: &WeightedDataset<TreePoint>,
) -> Result<TreePoint> {
    tree_frechet_mean_traced(tree, data).map(|t| t.mean)
}

/// Descends from the root along the edge whose one-sided derivative of the
/// Fréchet functional is negative. Moving from `v` along edge `e` changes the
/// functional at rate `2 (T - 2 S_e)`, where `T = Σ w_x d(x, v)` and `S_e`
/// restricts that sum to data whose path from `v` starts with `e`. Since the
/// `S_e` sum to at most `T`, at most one edge can be a descent direction. When
/// the edge just travelled becomes a descent direction again, the minimum is
/// interior to it and is the weighted mean of the data's coordinates on that
/// edge's line.
pub fn tree_frechet_mean_traced(
    tree: &WeightedTree,
    data: &WeightedDataset<TreePoint>,
) -> Result<TreeMeanTrace> {
    for p in data.points() {
        tree.validate_point(p)?;
    }
    let anchored: Vec<Anchored<usize>> = data.points().iter().map(|p| tree.anchor(p)).collect();
    let weights = data.weights();

    let mut v = 0usize;
    let mut came_by: Option<(usize, usize)> = None;
    let mut visits = 1;
    let mut branch = vec![0.0; tree.edges.len()];

    loop {
        branch.iter_mut().for_each(|s| *s = 0.0);
        let at_v = Anchored::vertex(v);
        let mut total = 0.0;
        for (x, &w) in anchored.iter().zip(weights) {
            let d = rooted::distance(tree, x, &at_v);
            total += w * d;
            if let Some(e) = tree.first_edge(v, x) {
                branch[e] += w * d;
            }
        }
        let slack = 1e-12 * total;

        if let Some((prev, edge)) = came_by {
            if total - 2.0 * branch[edge] < -slack {
                let mean = edge_mean(tree, &anchored, weights, prev, v, edge);
                return Ok(TreeMeanTrace { mean, visits });
            }
        }

        let mut best: Option<(usize, usize, f64)> = None;
        for &(e, w) in tree.incident(v) {
            let rate = total - 2.0 * branch[e];
            if rate < -slack && best.is_none_or(|(_, _, r)| rate < r) {
                best = Some((e, w, rate));
            }
        }
        match best {
            Some((e, next, _)) if visits < tree.n_vertices => {
                came_by = Some((v, e));
                v = next;
                visits += 1;
            }
            _ => {
                return Ok(TreeMeanTrace {
                    mean: TreePoint::Vertex(v),
                    visits,
                })
            }
        }
    }
}

/// Weighted mean of the data's signed coordinates along `edge`, measured from
/// `from` towards `to`, clamped to the edge.
fn edge_mean(
    tree: &WeightedTree,
    anchored: &[Anchored<usize>],
    weights: &[f64],
    from: usize,
    to: usize,
    edge: usize,
) -> TreePoint {
    let len = tree.edges[edge].weight;
    let child = tree.child_of_edge(edge);
    let (a_from, a_to) = (Anchored::vertex(from), Anchored::vertex(to));
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, &w) in anchored.iter().zip(weights) {
        let da = rooted::distance(tree, x, &a_from);
        let coord = if x.below == child && x.up > 0.0 {
            da
        } else {
            let db = rooted::distance(tree, x, &a_to);
            if da < db {
                -da
            } else {
                len + db
            }
        };
        num += w * coord;
        den += w;
    }
    let s = (num / den).clamp(0.0, len);
    let e = tree.edges[edge];
    let offset = if e.u == from { s } else { len - s };
    tree.canonicalize(TreePoint::Edge { edge, offset })
}

/// JSON tree fixture: `{"edges": [[u, v, w], ...], "points": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFixture {
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<TreePoint>>,
}

impl TreeFixture {
    pub fn from_json(text: &str) -> Result<(WeightedTree, Vec<TreePoint>)> {
        let fixture: TreeFixture =
            serde_json::from_str(text).map_err(|e| GeoError::InvalidTree(e.to_string()))?;
        let tree = WeightedTree::from_edges(fixture.edges)?;
        let points = fixture.points.unwrap_or_default();
        for p in &points {
            tree.validate_point(p)?;
        }
        Ok((tree, points))
    }
}

/// A finite metric tree as a geodesic space.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSpace {
    tree: Arc<WeightedTree>,
}

impl TreeSpace {
    pub fn new(tree: WeightedTree) -> Self {
        TreeSpace {
            tree: Arc::new(tree),
        }
    }

    pub fn tree(&self) -> &WeightedTree {
        &self.tree
    }
}

impl GeodesicSpace for TreeSpace {
    type Point = TreePoint;

    fn distance(&self, a: &TreePoint, b: &TreePoint) -> f64 {
        tree_distance(&self.tree, a, b).expect("distance: point not in tree")
    }

    fn interpolate(&self, a: &TreePoint, b: &TreePoint, t: f64) -> TreePoint {
        tree_interpolate(&self.tree, a, b, t).expect("interpolate: invalid tree arguments")
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl SampleMean for TreeSpace {
    fn sample_mean(&self, data: &WeightedDataset<TreePoint>) -> Result<TreePoint> {
        tree_frechet_mean(&self.tree, data)
    }
}
