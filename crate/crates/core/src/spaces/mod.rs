pub mod circle;
pub mod euclidean;
pub mod spd;
pub mod tree;
