//! Distribution samplers driven by [`RngStream`](crate::rng::RngStream).

mod gaussian;
mod spd_oracle;
mod walk;
mod wishart;

pub use gaussian::{sample_chi_square, sample_gaussian, standard_normal};
pub use spd_oracle::{
    conditional_moments_from_factor, spd_conditional_moments, spd_model_moments,
    ConditionalMoments, ModelMoments, DEFAULT_ORACLE_REPS,
};
pub use walk::{lazy_walk_3regular, walk_distance_distribution, DistanceDistribution};
pub use wishart::{sample_wishart, WishartSampler};
