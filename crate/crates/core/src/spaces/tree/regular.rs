use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rooted::{self, Anchored, Rooted};
use super::weighted::{tree_frechet_mean, Edge, TreePoint, WeightedTree};
use crate::error::{GeoError, Result};
use crate::geometry::{check_unit_interval, GeodesicSpace, SampleMean, Tolerance, WeightedDataset};

/// A vertex of the infinite 3-regular tree, as the child indices on its path
/// from the origin. The origin has children 0, 1, 2; every other vertex has
/// children 0, 1 besides its parent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TreeWord(Vec<u8>);

impl TreeWord {
    pub fn origin() -> Self {
        TreeWord(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&first) = letters.first() {
            if first > 2 {
                return Err(GeoError::domain("first letter must be 0, 1 or 2"));
            }
        }
        if letters.iter().skip(1).any(|&l| l > 1) {
            return Err(GeoError::domain("letters after the first must be 0 or 1"));
        }
        Ok(TreeWord(letters))
    }

    /// The vertex `depth` steps down the all-zero branch.
    pub fn zeros(depth: usize) -> Self {
        TreeWord(vec![0; depth])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of children: 3 at the origin, 2 elsewhere.
    pub fn child_count(&self) -> u8 {
        if self.0.is_empty() {
            3
        } else {
            2
        }
    }

    pub fn child(&self, letter: u8) -> Result<Self> {
        if letter >= self.child_count() {
            return Err(GeoError::domain(format!("vertex has no child {letter}")));
        }
        let mut letters = self.0.clone();
        letters.push(letter);
        Ok(TreeWord(letters))
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeWord(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub(crate) fn push(&mut self, letter: u8) {
        self.0.push(letter);
    }

    pub(crate) fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }

    pub fn is_prefix_of(&self, other: &TreeWord) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn common_prefix_len(&self, other: &TreeWord) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    fn prefix(&self, len: usize) -> TreeWord {
        TreeWord(self.0[..len].to_vec())
    }
}

impl fmt::Display for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeWord {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| GeoError::domain(format!("bad letter {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        TreeWord::new(letters)
    }
}

impl TryFrom<String> for TreeWord {
    type Error = GeoError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TreeWord> for String {
    fn from(w: TreeWord) -> Self {
        w.to_string()
    }
}

/// `|u| + |v| - 2 |lcp(u, v)|`.
pub fn word_distance(u: &TreeWord, v: &TreeWord) -> usize {
    u.len() + v.len() - 2 * u.common_prefix_len(v)
}

/// A point of the infinite 3-regular unit-edge tree: the vertex `below` or a
/// point at distance `up` in `(0, 1)` above it towards its parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordPoint {
    pub below: TreeWord,
    pub up: f64,
}

impl WordPoint {
    pub fn vertex(w: TreeWord) -> Self {
        WordPoint { below: w, up: 0.0 }
    }

    pub fn new(below: TreeWord, up: f64) -> Result<Self> {
        if !(up.is_finite() && (0.0..1.0).contains(&up)) {
            return Err(GeoError::domain(format!("offset {up} outside [0, 1)")));
        }
        if up > 0.0 && below.is_origin() {
            return Err(GeoError::domain("the origin has no parent edge"));
        }
        Ok(WordPoint { below, up })
    }

    pub fn is_vertex(&self) -> bool {
        self.up == 0.0
    }

    fn anchored(&self) -> Anchored<TreeWord> {
        Anchored {
            below: self.below.clone(),
            up: self.up,
        }
    }

    fn from_anchored(a: Anchored<TreeWord>) -> Self {
        WordPoint {
            below: a.below,
            up: a.up,
        }
    }
}

impl From<TreeWord> for WordPoint {
    fn from(w: TreeWord) -> Self {
        WordPoint::vertex(w)
    }
}

/// The infinite 3-regular tree with unit edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegularTree;

impl Rooted for RegularTree {
    type V = TreeWord;

    fn root_dist(&self, v: &TreeWord) -> f64 {
        v.len() as f64
    }

    fn parent(&self, v: &TreeWord) -> Option<TreeWord> {
        v.parent()
    }

    fn is_ancestor(&self, a: &TreeWord, b: &TreeWord) -> bool {
        a.is_prefix_of(b)
    }

    fn lca(&self, a: &TreeWord, b: &TreeWord) -> TreeWord {
        a.prefix(a.common_prefix_len(b))
    }
}

pub fn point_distance(a: &WordPoint, b: &WordPoint) -> f64 {
    rooted::distance(&RegularTree, &a.anchored(), &b.anchored())
}

/// The point at arc length `t d(u, v)` on the path from `u` to `v`.
pub fn word_interpolate(u: &WordPoint, v: &WordPoint, t: f64) -> Result<WordPoint> {
    check_unit_interval(t)?;
    Ok(WordPoint::from_anchored(rooted::interpolate(
        &RegularTree,
        &u.anchored(),
        &v.anchored(),
        t,
    )))
}

/// The finite subtree spanned by a set of vertices, with the map back to words.
#[derive(Clone, Debug)]
pub struct SpanningSubtree {
    pub tree: WeightedTree,
    /// Word of each vertex id; vertex 0 is the common prefix of all inputs.
    pub words: Vec<TreeWord>,
    /// The input words as vertices of `tree`.
    pub points: Vec<TreePoint>,
    ids: BTreeMap<TreeWord, usize>,
}

impl SpanningSubtree {
    /// Vertex id of `w`, if it belongs to the subtree.
    pub fn id(&self, w: &TreeWord) -> Option<usize> {
        self.ids.get(w).copied()
    }

    /// Position of `p` in the subtree; `None` if it lies outside.
    pub fn embed(&self, p: &WordPoint) -> Option<TreePoint> {
        let id = self.id(&p.below)?;
        if p.up == 0.0 {
            return Some(TreePoint::Vertex(id));
        }
        // Edge id - 1 joins vertex id to its parent.
        if id == 0 {
            return None;
        }
        Some(TreePoint::Edge {
            edge: id - 1,
            offset: 1.0 - p.up,
        })
    }

    pub fn lift(&self, p: &TreePoint) -> WordPoint {
        match self.tree.canonicalize(*p) {
            TreePoint::Vertex(v) => WordPoint::vertex(self.words[v].clone()),
            TreePoint::Edge { edge, offset } => {
                let child = self.tree.edges()[edge].v;
                WordPoint {
                    below: self.words[child].clone(),
                    up: 1.0 - offset,
                }
            }
        }
    }
}

/// Union of the paths between the given vertices, rooted at their longest
/// common prefix. Edges run parent to child with unit length.
pub fn materialize_spanning_subtree(words: &[TreeWord]) -> Result<SpanningSubtree> {
    let first = words
        .first()
        .ok_or_else(|| GeoError::domain("no words to span"))?;
    let base = words
        .iter()
        .map(|w| first.common_prefix_len(w))
        .min()
        .unwrap_or(0);

    let mut ids = BTreeMap::new();
    for w in words {
        for len in base..=w.len() {
            ids.entry(w.prefix(len)).or_insert(0);
        }
    }
    // Prefixes sort before their extensions, so parents get smaller ids.
    let mut vertex_words = Vec::with_capacity(ids.len());
    for (i, (w, id)) in ids.iter_mut().enumerate() {
        *id = i;
        vertex_words.push(w.clone());
    }
    let edges: Vec<Edge> = vertex_words
        .iter()
        .skip(1)
        .enumerate()
        .map(|(i, w)| {
            let parent = w.parent().expect("non-root vertex has a parent");
            Edge {
                u: ids[&parent],
                v: i + 1,
                weight: 1.0,
            }
        })
        .collect();
    let tree = WeightedTree::new(vertex_words.len(), edges)?;
    let points = words.iter().map(|w| TreePoint::Vertex(ids[w])).collect();
    Ok(SpanningSubtree {
        tree,
        words: vertex_words,
        points,
        ids,
    })
}

impl GeodesicSpace for RegularTree {
    type Point = WordPoint;

    fn distance(&self, a: &WordPoint, b: &WordPoint) -> f64 {
        point_distance(a, b)
    }

    fn interpolate(&self, a: &WordPoint, b: &WordPoint, t: f64) -> WordPoint {
        word_interpolate(a, b, t).expect("interpolate: t outside [0, 1]")
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl SampleMean for RegularTree {
    /// Runs the exact finite-tree algorithm on the subtree spanned by the
    /// data; the mean of points in a closed convex subtree stays inside it.
    fn sample_mean(&self, data: &WeightedDataset<WordPoint>) -> Result<WordPoint> {
        let mut words = Vec::with_capacity(2 * data.len());
        for p in data.points() {
            words.push(p.below.clone());
            if p.up > 0.0 {
                words.push(
                    p.below
                        .parent()
                        .ok_or_else(|| GeoError::domain("point above the origin"))?,
                );
            }
        }
        let sub = materialize_spanning_subtree(&words)?;
        let embedded = data
            .points()
            .iter()
            .map(|p| {
                sub.embed(p)
                    .ok_or_else(|| GeoError::domain("point outside spanning subtree"))
            })
            .collect::<Result<Vec<_>>>()?;
        let local = WeightedDataset::new(embedded, data.weights().to_vec())?;
        let mean = tree_frechet_mean(&sub.tree, &local)?;
        Ok(sub.lift(&mean))
    }
}
