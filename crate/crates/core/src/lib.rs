//! Geodesic James-Stein shrinkage for Fréchet means on Hadamard spaces.
//!
//! - [`geometry`]: the [`geometry::GeodesicSpace`] contract, product spaces
//!   and Fréchet-mean utilities.
//! - [`spaces`]: Euclidean space, the circle, SPD matrices under the
//!   log-Euclidean metric, and metric trees.
//! - [`samplers`], [`rng`]: reproducible random draws for the experiments.
//! - [`estimators`]: shrinkage weights and the geodesic James-Stein estimator.
//! - [`harness`]: parallel Monte Carlo risk estimation and the experiment
//!   runners; [`validate`]: randomised property suites.
//!
//! ```
//! use geoshrink::estimators::{geodesic_js, ShrinkageSpec, Target, Variance};
//! use geoshrink::geometry::{ProductPoint, ProductSpace};
//! use geoshrink::spaces::spd::{Spd, SpdPoint};
//!
//! # fn main() -> geoshrink::Result<()> {
//! let spaces = ProductSpace::uniform(Spd::new(2), 3)?;
//! let x = ProductPoint(vec![
//!     SpdPoint::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0])?,
//!     SpdPoint::from_row_slice(2, &[1.0, 0.0, 0.0, 4.0])?,
//!     SpdPoint::from_row_slice(2, &[0.5, 0.1, 0.1, 0.7])?,
//! ]);
//! let spec = ShrinkageSpec::james_stein(Variance::Common(0.2), Target::AdaptiveSampleMean);
//! let estimate = geodesic_js(&spaces, &x, &spec)?;
//! assert!(estimate.weight_applied > 0.0 && estimate.weight_applied <= 1.0);
//! # Ok(())
//! # }
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod samplers;
pub mod spaces;
pub mod validate;

pub use error::{GeoError, Result};
