use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{GeoError, Result};
use crate::spaces::euclidean::EuclideanPoint;

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `N(mean, sd^2 I)`.
pub fn sample_gaussian<R: Rng + ?Sized>(
    mean: &EuclideanPoint,
    sd: f64,
    rng: &mut R,
) -> Result<EuclideanPoint> {
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(GeoError::domain(
            "standard deviation must be finite and nonnegative",
        ));
    }
    let coords = mean
        .coords()
        .iter()
        .map(|m| m + sd * standard_normal(rng))
        .collect();
    Ok(EuclideanPoint(coords))
}

/// Below this many degrees of freedom a chi-square is drawn as a sum of
/// squared normals.
const CHI_SQUARE_DIRECT_MAX: u32 = 340;

pub fn sample_chi_square<R: Rng + ?Sized>(df: u32, rng: &mut R) -> f64 {
    if df <= CHI_SQUARE_DIRECT_MAX {
        (0..df)
            .map(|_| {
                let z = standard_normal(rng);
                z * z
            })
            .sum()
    } else {
        Gamma::new(f64::from(df) / 2.0, 2.0)
            .expect("positive shape")
            .sample(rng)
    }
}
