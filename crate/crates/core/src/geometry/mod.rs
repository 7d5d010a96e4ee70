//! Space-agnostic geodesic geometry.
//!
//! Every concrete space implements [`GeodesicSpace`]: a metric `d(x, y)` and
//! the constant-speed geodesic `[x, y]_t`. On top of that contract this module
//! provides product spaces, Fréchet functionals, a brute-force Fréchet-mean
//! oracle and CAT(0) diagnostics.

mod frechet;
mod product;

use std::fmt::Debug;

use crate::error::{GeoError, Result};

pub use frechet::{
    brute_force_frechet_mean, cat0_slack, conditional_frechet_mean_discrete, frechet_functional,
    pair_convexity_gap,
};
pub use product::{ProductPoint, ProductSpace};

/// Absolute/relative tolerance used to compare distances.
///
/// Values of magnitude at most one are compared absolutely, larger ones
/// relative to their magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Allowed error for quantities of the given magnitude.
    pub fn allowance(&self, scale: f64) -> f64 {
        let scale = scale.abs();
        if scale <= 1.0 {
            self.abs
        } else {
            self.rel * scale
        }
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.allowance(a.abs().max(b.abs()))
    }
}

/// A uniquely geodesic metric space.
///
/// Implementations must satisfy `distance(x, x) = 0`, symmetry, the triangle
/// inequality, `interpolate(x, y, 0) = x`, `interpolate(x, y, 1) = y` and the
/// constant-speed property
/// `d([x,y]_s, [x,y]_t) = |t - s| d(x, y)`.
pub trait GeodesicSpace: Sync {
    type Point: Clone + Debug + Send + Sync;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// The point a fraction `t` of the way along the geodesic from `x` to `y`.
    ///
    /// Callers are expected to pass `t` in `[0, 1]`; use
    /// [`checked_interpolate`] when the parameter comes from outside.
    fn interpolate(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Self::Point;

    fn points_equal(&self, x: &Self::Point, y: &Self::Point, tol: f64) -> bool {
        self.distance(x, y) <= tol
    }

    /// Whether the space satisfies the CAT(0) inequality.
    fn is_hadamard(&self) -> bool {
        true
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::default()
    }
}

/// Spaces with a routine computing weighted sample Fréchet means.
pub trait SampleMean: GeodesicSpace {
    fn sample_mean(&self, data: &WeightedDataset<Self::Point>) -> Result<Self::Point>;
}

pub(crate) fn check_unit_interval(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(GeoError::domain(format!(
            "geodesic parameter {t} outside [0, 1]"
        )))
    }
}

/// [`GeodesicSpace::interpolate`] with a domain check on `t`.
pub fn checked_interpolate<S: GeodesicSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    t: f64,
) -> Result<S::Point> {
    check_unit_interval(t)?;
    Ok(space.interpolate(x, y, t))
}

/// Points with nonnegative weights, the input of sample Fréchet means.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDataset<P> {
    points: Vec<P>,
    weights: Vec<f64>,
}

impl<P> WeightedDataset<P> {
    pub fn new(points: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(GeoError::Dimension {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if points.is_empty() {
            return Err(GeoError::domain("empty dataset"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(GeoError::domain("weights must be finite and nonnegative"));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(GeoError::domain("at least one weight must be positive"));
        }
        Ok(WeightedDataset { points, weights })
    }

    /// Unit weights.
    pub fn uniform(points: Vec<P>) -> Result<Self> {
        let weights = vec![1.0; points.len()];
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}
