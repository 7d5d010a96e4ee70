//! Metric trees: finite trees with positive edge lengths, and the infinite
//! 3-regular tree with unit edges encoded by words.

mod regular;
mod rooted;
mod weighted;

pub use regular::{
    materialize_spanning_subtree, point_distance, word_distance, word_interpolate, RegularTree,
    SpanningSubtree, TreeWord, WordPoint,
};
pub use weighted::{
    tree_distance, tree_frechet_mean, tree_frechet_mean_traced, tree_interpolate, Edge,
    TreeFixture, TreeMeanTrace, TreePoint, TreeSpace, WeightedTree,
};

/// Vertex ids of the tripod returned by [`WeightedTree::tripod`].
pub mod tripod {
    pub const CENTER: usize = 0;
    pub const A: usize = 1;
    pub const B: usize = 2;
    pub const C: usize = 3;
}

#[cfg(test)]
mod tests;
