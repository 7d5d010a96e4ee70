use serde::{Deserialize, Serialize};

use super::{check_unit_interval, GeodesicSpace};
use crate::error::{GeoError, Result};

/// A point `(x_1, ..., x_n)` of a product space, one component per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint<P>(pub Vec<P>);

impl<P> ProductPoint<P> {
    pub fn new(components: Vec<P>) -> Self {
        ProductPoint(components)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[P] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, P> {
        self.0.iter()
    }
}

impl<P: Clone> ProductPoint<P> {
    /// `n` copies of the same point.
    pub fn replicate(point: &P, n: usize) -> Self {
        ProductPoint(vec![point.clone(); n])
    }
}

impl<P> std::ops::Index<usize> for ProductPoint<P> {
    type Output = P;
    fn index(&self, i: usize) -> &P {
        &self.0[i]
    }
}

/// Product of geodesic spaces with the metric
/// `d(x, y) = (sum_i d_i(x_i, y_i)^2 / n)^(1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace<S> {
    spaces: Vec<S>,
}

impl<S: GeodesicSpace> ProductSpace<S> {
    pub fn new(spaces: Vec<S>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(GeoError::domain("product of zero spaces"));
        }
        Ok(ProductSpace { spaces })
    }

    pub fn spaces(&self) -> &[S] {
        &self.spaces
    }

    pub fn space(&self, i: usize) -> &S {
        &self.spaces[i]
    }

    pub fn n(&self) -> usize {
        self.spaces.len()
    }

    fn check_len(&self, p: &ProductPoint<S::Point>) -> Result<()> {
        if p.len() != self.n() {
            return Err(GeoError::Dimension {
                expected: self.n(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Per-group squared distances `d_i(a_i, b_i)^2`.
    pub fn component_dist2(
        &self,
        a: &ProductPoint<S::Point>,
        b: &ProductPoint<S::Point>,
    ) -> Result<Vec<f64>> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self
            .spaces
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(s, (x, y))| {
                let d = s.distance(x, y);
                d * d
            })
            .collect())
    }

    /// Squared product distance, `sum_i d_i^2 / n`.
    pub fn dist2(&self, a: &ProductPoint<S::Point>, b: &ProductPoint<S::Point>) -> Result<f64> {
        let d2 = self.component_dist2(a, b)?;
        Ok(d2.iter().sum::<f64>() / self.n() as f64)
    }

    pub fn product_distance(
        &self,
        a: &ProductPoint<S::Point>,
        b: &ProductPoint<S::Point>,
    ) -> Result<f64> {
        Ok(self.dist2(a, b)?.sqrt())
    }

    pub fn product_interpolate(
        &self,
        a: &ProductPoint<S::Point>,
        b: &ProductPoint<S::Point>,
        t: f64,
    ) -> Result<ProductPoint<S::Point>> {
        check_unit_interval(t)?;
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.interpolate_unchecked(a, b, t))
    }

    fn interpolate_unchecked(
        &self,
        a: &ProductPoint<S::Point>,
        b: &ProductPoint<S::Point>,
        t: f64,
    ) -> ProductPoint<S::Point> {
        ProductPoint(
            self.spaces
                .iter()
                .zip(a.iter().zip(b.iter()))
                .map(|(s, (x, y))| s.interpolate(x, y, t))
                .collect(),
        )
    }
}

impl<S: GeodesicSpace + PartialEq> ProductSpace<S> {
    /// `n` copies of one space.
    pub fn uniform(space: S, n: usize) -> Result<Self>
    where
        S: Clone,
    {
        Self::new(vec![space; n])
    }

    /// True when all factors are the same space.
    pub fn is_homogeneous(&self) -> bool {
        self.spaces.windows(2).all(|w| w[0] == w[1])
    }
}

impl<S: GeodesicSpace> GeodesicSpace for ProductSpace<S> {
    type Point = ProductPoint<S::Point>;

    /// Panics on mismatched component counts; see [`ProductSpace::product_distance`].
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.product_distance(x, y)
            .expect("product point has the wrong number of components")
    }

    fn interpolate(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Self::Point {
        assert!(
            x.len() == self.n() && y.len() == self.n(),
            "product point has the wrong number of components"
        );
        self.interpolate_unchecked(x, y, t)
    }

    fn is_hadamard(&self) -> bool {
        self.spaces.iter().all(|s| s.is_hadamard())
    }

    fn tolerance(&self) -> super::Tolerance {
        self.spaces[0].tolerance()
    }
}
