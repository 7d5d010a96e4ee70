//! Flat Euclidean space `R^dim` and the classical James-Stein formulas.

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry::{GeodesicSpace, SampleMean, Tolerance, WeightedDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanPoint(pub Vec<f64>);

impl EuclideanPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeoError::domain("Euclidean point needs dimension >= 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::domain("non-finite coordinate"));
        }
        Ok(EuclideanPoint(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn translate(&self, by: &[f64]) -> EuclideanPoint {
        EuclideanPoint(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    pub dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        Euclidean { dim }
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<EuclideanPoint> {
        if coords.len() != self.dim {
            return Err(GeoError::Dimension {
                expected: self.dim,
                got: coords.len(),
            });
        }
        EuclideanPoint::new(coords)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect()
}

impl GeodesicSpace for Euclidean {
    type Point = EuclideanPoint;

    fn distance(&self, x: &EuclideanPoint, y: &EuclideanPoint) -> f64 {
        sq_dist(&x.0, &y.0).sqrt()
    }

    fn interpolate(&self, x: &EuclideanPoint, y: &EuclideanPoint, t: f64) -> EuclideanPoint {
        EuclideanPoint(lerp(&x.0, &y.0, t))
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::new(1e-10, 1e-10)
    }
}

impl SampleMean for Euclidean {
    fn sample_mean(&self, data: &WeightedDataset<EuclideanPoint>) -> Result<EuclideanPoint> {
        let total = data.total_weight();
        let mut acc = vec![0.0; self.dim];
        for (p, w) in data.iter() {
            if p.dim() != self.dim {
                return Err(GeoError::Dimension {
                    expected: self.dim,
                    got: p.dim(),
                });
            }
            for (a, c) in acc.iter_mut().zip(&p.0) {
                *a += w * c;
            }
        }
        acc.iter_mut().for_each(|a| *a /= total);
        Ok(EuclideanPoint(acc))
    }
}

/// Result of a classical shrinkage formula.
#[derive(Debug, Clone, PartialEq)]
pub struct JsOutcome {
    pub point: EuclideanPoint,
    /// Weight `s` placed on the shrinkage point.
    pub shrink: f64,
    /// `X == psi`, where the formula is undefined and `psi` is returned.
    pub degenerate: bool,
}

fn check_js_inputs(x: &EuclideanPoint, psi: &EuclideanPoint, sigma2: f64) -> Result<()> {
    if x.dim() != psi.dim() {
        return Err(GeoError::Dimension {
            expected: x.dim(),
            got: psi.dim(),
        });
    }
    if x.dim() < 3 {
        return Err(GeoError::domain("James-Stein requires dimension >= 3"));
    }
    if !(sigma2 > 0.0) {
        return Err(GeoError::domain("sigma2 must be positive"));
    }
    Ok(())
}

/// Stein's estimator `psi s + (1 - s) X` with `s = sigma2 (n - 2) / |X - psi|^2`,
/// without the positive-part clamp.
pub fn classical_js(x: &EuclideanPoint, psi: &EuclideanPoint, sigma2: f64) -> Result<JsOutcome> {
    check_js_inputs(x, psi, sigma2)?;
    let n = x.dim() as f64;
    let d2 = sq_dist(&x.0, &psi.0);
    if d2 == 0.0 {
        return Ok(JsOutcome {
            point: psi.clone(),
            shrink: 1.0,
            degenerate: true,
        });
    }
    let s = sigma2 * (n - 2.0) / d2;
    let coords =
        x.0.iter()
            .zip(&psi.0)
            .map(|(a, p)| s * p + (1.0 - s) * a)
            .collect();
    Ok(JsOutcome {
        point: EuclideanPoint(coords),
        shrink: s,
        degenerate: false,
    })
}

/// Positive-part James-Stein, `[X, psi]_w` with `w = 1 ∧ (n-2) sigma2 / |X - psi|^2`.
pub fn positive_part_js(
    x: &EuclideanPoint,
    psi: &EuclideanPoint,
    sigma2: f64,
) -> Result<JsOutcome> {
    check_js_inputs(x, psi, sigma2)?;
    let n = x.dim() as f64;
    let d2 = sq_dist(&x.0, &psi.0);
    if d2 == 0.0 {
        return Ok(JsOutcome {
            point: psi.clone(),
            shrink: 1.0,
            degenerate: true,
        });
    }
    let s = (sigma2 * (n - 2.0) / d2).min(1.0);
    Ok(JsOutcome {
        point: EuclideanPoint(lerp(&x.0, &psi.0, s)),
        shrink: s,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> EuclideanPoint {
        EuclideanPoint(c.to_vec())
    }

    #[test]
    fn classical_js_hand_example() {
        let out = classical_js(&p(&[2.0, 0.0, 0.0]), &p(&[0.0; 3]), 1.0).unwrap();
        assert!((out.shrink - 0.25).abs() < 1e-15);
        assert_eq!(out.point, p(&[1.5, 0.0, 0.0]));
    }

    #[test]
    fn classical_js_unit_shrink_returns_psi() {
        // |X - psi|^2 = sigma2 (n - 2) = 1
        let psi = p(&[1.0, 1.0, 1.0]);
        let out = classical_js(&p(&[2.0, 1.0, 1.0]), &psi, 1.0).unwrap();
        assert!((out.shrink - 1.0).abs() < 1e-15);
        assert_eq!(out.point, psi);
    }

    #[test]
    fn classical_js_vanishing_variance() {
        let x = p(&[3.0, -1.0, 2.0]);
        let out = classical_js(&x, &p(&[0.0; 3]), 1e-14).unwrap();
        assert!(Euclidean::new(3).distance(&out.point, &x) < 1e-12);
    }

    #[test]
    fn classical_js_degenerate_at_psi() {
        let x = p(&[1.0, 2.0, 3.0]);
        let out = classical_js(&x, &x, 1.0).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.point, x);
    }

    #[test]
    fn classical_js_rejects_low_dimension() {
        assert!(classical_js(&p(&[1.0, 2.0]), &p(&[0.0, 0.0]), 1.0).is_err());
        assert!(classical_js(&p(&[1.0, 2.0, 3.0]), &p(&[0.0; 3]), 0.0).is_err());
    }

    #[test]
    fn positive_part_examples() {
        let zero = p(&[0.0; 3]);
        // weight would be 4 > 1
        let out = positive_part_js(&p(&[0.5, 0.0, 0.0]), &zero, 1.0).unwrap();
        assert_eq!(out.point, zero);
        let out = positive_part_js(&p(&[2.0, 0.0, 0.0]), &zero, 1.0).unwrap();
        assert_eq!(out.point, p(&[1.5, 0.0, 0.0]));
        let out = positive_part_js(&zero, &zero, 1.0).unwrap();
        assert_eq!(out.point, zero);
    }

    #[test]
    fn sample_mean_is_weighted_average() {
        let space = Euclidean::new(1);
        let data = WeightedDataset::new(vec![p(&[0.0]), p(&[2.0])], vec![1.0, 3.0]).unwrap();
        assert_eq!(space.sample_mean(&data).unwrap(), p(&[1.5]));
    }

    proptest! {
        #[test]
        fn classical_js_translation_equivariant(
            x in prop::collection::vec(-10.0f64..10.0, 5),
            psi in prop::collection::vec(-10.0f64..10.0, 5),
            c in prop::collection::vec(-10.0f64..10.0, 5),
            sigma2 in 0.1f64..4.0,
        ) {
            let (x, psi) = (p(&x), p(&psi));
            prop_assume!(sq_dist(&x.0, &psi.0) > 1.0);
            let a = classical_js(&x.translate(&c), &psi.translate(&c), sigma2).unwrap();
            let b = classical_js(&x, &psi, sigma2).unwrap().point.translate(&c);
            for (u, v) in a.point.0.iter().zip(&b.0) {
                prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs())));
            }
        }
    }
}
