use nalgebra::DMatrix;
use rand::Rng;

use super::gaussian::{sample_chi_square, standard_normal};
use crate::error::{GeoError, Result};
use crate::spaces::spd::SpdPoint;

/// Bartlett sampler for `Wishart_k(scale, df)`: `W = L A A^T L^T` with
/// `scale = L L^T` and `A` lower triangular, `A_ii^2 ~ chi^2(df - i)` for
/// `i = 0..k` and standard normal entries below the diagonal.
#[derive(Clone, Debug)]
pub struct WishartSampler {
    chol: DMatrix<f64>,
    df: u32,
}

impl WishartSampler {
    pub fn new(scale: &SpdPoint, df: u32) -> Result<Self> {
        let k = scale.dim();
        if (df as usize) < k {
            return Err(GeoError::domain(format!(
                "Wishart needs df >= {k}, got {df}"
            )));
        }
        let chol = scale
            .matrix()
            .clone()
            .cholesky()
            .ok_or(GeoError::NotPositiveDefinite)?
            .l();
        Ok(WishartSampler { chol, df })
    }

    /// Sampler for `Wishart(B B^T, df)` from any square factor `B`; the
    /// Bartlett construction only needs some square root of the scale.
    pub fn from_factor(b: DMatrix<f64>, df: u32) -> Result<Self> {
        if b.nrows() != b.ncols() {
            return Err(GeoError::Dimension {
                expected: b.nrows(),
                got: b.ncols(),
            });
        }
        if (df as usize) < b.nrows() {
            return Err(GeoError::domain(format!(
                "Wishart needs df >= {}, got {df}",
                b.nrows()
            )));
        }
        Ok(WishartSampler { chol: b, df })
    }

    pub fn dim(&self) -> usize {
        self.chol.nrows()
    }

    /// Bartlett factor `L A`, so that `W = B B^T`.
    pub fn sample_factor<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let k = self.dim();
        let mut a = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            a[(i, i)] = sample_chi_square(self.df - i as u32, rng).sqrt();
            for j in 0..i {
                a[(i, j)] = standard_normal(rng);
            }
        }
        &self.chol * a
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpdPoint> {
        SpdPoint::from_factor(&self.sample_factor(rng))
    }

    /// `W / divisor`.
    pub fn sample_scaled<R: Rng + ?Sized>(&self, divisor: f64, rng: &mut R) -> Result<SpdPoint> {
        SpdPoint::from_factor(&(self.sample_factor(rng) / divisor.sqrt()))
    }
}

pub fn sample_wishart<R: Rng + ?Sized>(scale: &SpdPoint, df: u32, rng: &mut R) -> Result<SpdPoint> {
    WishartSampler::new(scale, df)?.sample(rng)
}
