//! Geodesic James-Stein estimators on product spaces.
//!
//! The estimate is `[X, psi]_w`, moving every group along its geodesic towards
//! the shrinkage point by one common fraction `w`.

use crate::error::{GeoError, Result};
use crate::geometry::{GeodesicSpace, ProductPoint, ProductSpace, SampleMean, WeightedDataset};

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(GeoError::domain(format!(
            "{name} must be finite and nonnegative, got {x}"
        )))
    }
}

/// `1 ∧ sigma2 / dist2`, with weight 1 when `dist2 = 0`.
pub fn js_weight(sigma2: f64, dist2: f64) -> Result<f64> {
    check_nonneg("sigma2", sigma2)?;
    check_nonneg("dist2", dist2)?;
    if dist2 == 0.0 {
        return Ok(1.0);
    }
    Ok((sigma2 / dist2).min(1.0))
}

/// `1 ∧ alpha0 / dist2` for a known lower bound `alpha0` on the variance.
pub fn alpha_scaled_weight(alpha0: f64, dist2: f64) -> Result<f64> {
    if !(alpha0 > 0.0) {
        return Err(GeoError::domain("alpha0 must be positive"));
    }
    js_weight(alpha0, dist2)
}

/// Outcome of [`oracle_weight`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleWeight {
    pub weight: f64,
    /// `rho_x_psi2 = 0`: the weight is set to 1.
    pub degenerate: bool,
}

/// Minimiser of the CAT(0) risk bound,
/// `(sigma2 + rho_x_psi2 - rho_t_psi2) / (2 rho_x_psi2)` clamped to `[0, 1]`.
///
/// `rho_t_psi2` is either `d(theta, psi)^2` for a fixed `theta`, or its
/// expectation when `theta` is random; the formula is the same.
pub fn oracle_weight(sigma2: f64, rho_x_psi2: f64, rho_t_psi2: f64) -> Result<OracleWeight> {
    check_nonneg("sigma2", sigma2)?;
    check_nonneg("rho_x_psi2", rho_x_psi2)?;
    check_nonneg("rho_t_psi2", rho_t_psi2)?;
    if rho_x_psi2 == 0.0 {
        return Ok(OracleWeight {
            weight: 1.0,
            degenerate: true,
        });
    }
    let t = (sigma2 + rho_x_psi2 - rho_t_psi2) / (2.0 * rho_x_psi2);
    Ok(OracleWeight {
        weight: t.clamp(0.0, 1.0),
        degenerate: false,
    })
}

/// Variance information supplied to the estimator.
#[derive(Clone, Debug, PartialEq)]
pub enum Variance {
    /// The same `sigma_i^2` in every group.
    Common(f64),
    /// One `sigma_i^2` per group.
    PerGroup(Vec<f64>),
    /// Only a lower bound `alpha0` on the average variance is known.
    LowerBound(f64),
}

/// Where the estimator shrinks to.
#[derive(Clone, Debug, PartialEq)]
pub enum Target<P> {
    Fixed(ProductPoint<P>),
    /// The sample Fréchet mean of the groups, repeated in every slot.
    AdaptiveSampleMean,
    /// The known prior mean.
    OracleMu(ProductPoint<P>),
}

/// How the weight is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRule {
    JamesStein,
    /// `alpha` times the James-Stein weight, `alpha` in `(0, 1]`.
    AlphaScaled(f64),
    /// A fixed weight in `[0, 1]`.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkageSpec<P> {
    pub variance: Variance,
    pub target: Target<P>,
    pub weight: WeightRule,
}

impl<P> ShrinkageSpec<P> {
    pub fn james_stein(variance: Variance, target: Target<P>) -> Self {
        ShrinkageSpec {
            variance,
            target,
            weight: WeightRule::JamesStein,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match &self.variance {
            Variance::Common(s) if *s > 0.0 && s.is_finite() => {}
            Variance::PerGroup(v) if v.len() != n => {
                return Err(GeoError::Dimension {
                    expected: n,
                    got: v.len(),
                });
            }
            Variance::PerGroup(v) if v.iter().all(|s| *s > 0.0 && s.is_finite()) => {}
            Variance::LowerBound(a) if *a > 0.0 && a.is_finite() => {}
            _ => return Err(GeoError::domain("variances must be positive")),
        }
        match self.weight {
            WeightRule::AlphaScaled(a) if !(a > 0.0 && a <= 1.0) => {
                Err(GeoError::domain("alpha must lie in (0, 1]"))
            }
            WeightRule::Fixed(t) if !(0.0..=1.0).contains(&t) => {
                Err(GeoError::domain("weight must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// `sum_i sigma_i^2`, or `n alpha0` for a lower bound.
    fn sigma2_sum(&self, n: usize) -> f64 {
        match &self.variance {
            Variance::Common(s) | Variance::LowerBound(s) => s * n as f64,
            Variance::PerGroup(v) => v.iter().sum(),
        }
    }
}

/// An estimate and the quantities that determined it.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkageEstimate<P> {
    pub points: ProductPoint<P>,
    pub target: ProductPoint<P>,
    pub weight_applied: f64,
    /// `d(X, psi)^2` in the averaged product metric.
    pub dist2: f64,
    /// Average variance `sum_i sigma_i^2 / n`.
    pub sigma2: f64,
}

/// Sample Fréchet mean of the groups, repeated `n` times.
pub fn adaptive_shrink_point<S>(
    spaces: &ProductSpace<S>,
    x: &ProductPoint<S::Point>,
) -> Result<ProductPoint<S::Point>>
where
    S: SampleMean + PartialEq,
{
    if !spaces.is_homogeneous() {
        return Err(GeoError::domain(
            "sample-mean target needs all groups in one space",
        ));
    }
    if x.len() != spaces.n() {
        return Err(GeoError::Dimension {
            expected: spaces.n(),
            got: x.len(),
        });
    }
    let data = WeightedDataset::uniform(x.components().to_vec())?;
    let mean = spaces.space(0).sample_mean(&data)?;
    Ok(ProductPoint::replicate(&mean, spaces.n()))
}

/// The geodesic James-Stein estimate `[X, psi]_w`.
///
/// With the James-Stein rule `w = 1 ∧ sum_i sigma_i^2 / sum_i d_i(X_i, psi_i)^2`.
pub fn geodesic_js<S>(
    spaces: &ProductSpace<S>,
    x: &ProductPoint<S::Point>,
    spec: &ShrinkageSpec<S::Point>,
) -> Result<ShrinkageEstimate<S::Point>>
where
    S: SampleMean + PartialEq,
{
    let n = spaces.n();
    spec.validate(n)?;
    let target = match &spec.target {
        Target::Fixed(p) | Target::OracleMu(p) => p.clone(),
        Target::AdaptiveSampleMean => adaptive_shrink_point(spaces, x)?,
    };
    let d2_sum: f64 = spaces.component_dist2(x, &target)?.iter().sum();
    let sigma2_sum = spec.sigma2_sum(n);
    let js = js_weight(sigma2_sum, d2_sum)?;
    let weight = match spec.weight {
        WeightRule::JamesStein => js,
        WeightRule::AlphaScaled(a) => a * js,
        WeightRule::Fixed(t) => t,
    };
    let points = spaces.product_interpolate(x, &target, weight)?;
    Ok(ShrinkageEstimate {
        points,
        target,
        weight_applied: weight,
        dist2: d2_sum / n as f64,
        sigma2: sigma2_sum / n as f64,
    })
}

/// Upper bound on the loss of `[X, psi]_w` from the CAT(0) inequality, split
/// as `(a) + (b) + (c)`: on `{w < 1}`, `(a) = (1 - w)(d(X, theta)^2 - sigma^2)`
/// and `(b) = w d(theta, psi)^2`; on `{w = 1}`, `(c) = d(theta, psi)^2`.
///
/// The split uses `w d(X, psi)^2 = sigma^2`, which holds for the James-Stein
/// weight; `cat0` is the bound for an arbitrary weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossCertificate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `(1-w) d(X,theta)^2 + w d(theta,psi)^2 - w(1-w) d(X,psi)^2`.
    pub cat0: f64,
    /// Scale of the terms, for tolerances.
    pub scale: f64,
}

impl LossCertificate {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c
    }
}

pub fn loss_certificate<S: GeodesicSpace>(
    spaces: &ProductSpace<S>,
    x: &ProductPoint<S::Point>,
    theta: &ProductPoint<S::Point>,
    estimate: &ShrinkageEstimate<S::Point>,
) -> Result<LossCertificate> {
    let w = estimate.weight_applied;
    let d_xt = spaces.dist2(x, theta)?;
    let d_tp = spaces.dist2(theta, &estimate.target)?;
    let d_xp = estimate.dist2;
    let cat0 = (1.0 - w) * d_xt + w * d_tp - w * (1.0 - w) * d_xp;
    let (a, b, c) = if w < 1.0 {
        ((1.0 - w) * (d_xt - estimate.sigma2), w * d_tp, 0.0)
    } else {
        (0.0, 0.0, d_tp)
    };
    Ok(LossCertificate {
        a,
        b,
        c,
        cat0,
        scale: 1.0 + d_xt + d_tp + d_xp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::euclidean::{positive_part_js, Euclidean, EuclideanPoint};
    use crate::spaces::tree::{word_interpolate, RegularTree, TreeWord, WordPoint};
    use proptest::prelude::*;

    fn e1(x: f64) -> EuclideanPoint {
        EuclideanPoint(vec![x])
    }

    #[test]
    fn weight_examples() {
        assert_eq!(js_weight(1.0, 4.0).unwrap(), 0.25);
        assert_eq!(js_weight(1.0, 0.5).unwrap(), 1.0);
        assert_eq!(js_weight(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(js_weight(1.0, 0.0).unwrap(), 1.0);
        assert!(js_weight(-1.0, 1.0).is_err());
        assert_eq!(alpha_scaled_weight(0.5, 4.0).unwrap(), 0.125);
        assert_eq!(alpha_scaled_weight(5.0, 4.0).unwrap(), 1.0);
        assert_eq!(
            alpha_scaled_weight(0.7, 2.0).unwrap(),
            js_weight(0.7, 2.0).unwrap()
        );
    }

    #[test]
    fn oracle_examples() {
        let w = oracle_weight(1.0, 4.0, 3.0).unwrap();
        assert_eq!(w.weight, 0.25);
        assert_eq!(oracle_weight(2.0, 2.0, 0.0).unwrap().weight, 1.0);
        assert_eq!(oracle_weight(0.0, 3.0, 3.0).unwrap().weight, 0.0);
        let d = oracle_weight(1.0, 0.0, 0.0).unwrap();
        assert!(d.degenerate && d.weight == 1.0);
    }

    #[test]
    fn euclidean_three_groups() {
        let spaces = ProductSpace::uniform(Euclidean::new(1), 3).unwrap();
        let x = ProductPoint(vec![e1(2.0), e1(0.0), e1(0.0)]);
        let psi = ProductPoint::replicate(&e1(0.0), 3);
        let est = geodesic_js(
            &spaces,
            &x,
            &ShrinkageSpec::james_stein(Variance::Common(1.0), Target::Fixed(psi)),
        )
        .unwrap();
        assert_eq!(est.weight_applied, 0.75);
        assert_eq!(est.points, ProductPoint(vec![e1(0.5), e1(0.0), e1(0.0)]));
    }

    #[test]
    fn full_weight_returns_target() {
        let spaces = ProductSpace::uniform(Euclidean::new(1), 2).unwrap();
        let x = ProductPoint(vec![e1(0.1), e1(-0.1)]);
        let psi = ProductPoint::replicate(&e1(0.0), 2);
        let est = geodesic_js(
            &spaces,
            &x,
            &ShrinkageSpec::james_stein(Variance::Common(1.0), Target::Fixed(psi.clone())),
        )
        .unwrap();
        assert_eq!(est.weight_applied, 1.0);
        assert_eq!(est.points, psi);
    }

    #[test]
    fn vanishing_shrinkage() {
        let spaces = ProductSpace::uniform(Euclidean::new(1), 2).unwrap();
        let x = ProductPoint(vec![e1(1e3), e1(-1e3)]);
        let psi = ProductPoint::replicate(&e1(0.0), 2);
        let est = geodesic_js(
            &spaces,
            &x,
            &ShrinkageSpec::james_stein(Variance::Common(1.0), Target::Fixed(psi)),
        )
        .unwrap();
        assert!(spaces.product_distance(&est.points, &x).unwrap() <= 1e-6 * 1e3);
    }

    #[test]
    fn adaptive_targets() {
        let spaces = ProductSpace::uniform(Euclidean::new(1), 3).unwrap();
        let x = ProductPoint(vec![e1(1.0), e1(2.0), e1(6.0)]);
        assert_eq!(
            adaptive_shrink_point(&spaces, &x).unwrap(),
            ProductPoint::replicate(&e1(3.0), 3)
        );
        let same = ProductPoint::replicate(&e1(4.0), 3);
        assert_eq!(adaptive_shrink_point(&spaces, &same).unwrap(), same);

        let tree = ProductSpace::uniform(RegularTree, 2).unwrap();
        let a = WordPoint::vertex("0110".parse::<TreeWord>().unwrap());
        let b = WordPoint::vertex("21".parse::<TreeWord>().unwrap());
        let m = adaptive_shrink_point(&tree, &ProductPoint(vec![a.clone(), b.clone()])).unwrap();
        assert!(RegularTree.distance(&m[0], &word_interpolate(&a, &b, 0.5).unwrap()) < 1e-12);
    }

    #[test]
    fn heterogeneous_product_rejects_sample_mean() {
        let spaces = ProductSpace::new(vec![Euclidean::new(1), Euclidean::new(2)]).unwrap();
        let x = ProductPoint(vec![e1(1.0), EuclideanPoint(vec![0.0, 1.0])]);
        let spec = ShrinkageSpec::james_stein(Variance::Common(1.0), Target::AdaptiveSampleMean);
        assert!(geodesic_js(&spaces, &x, &spec).is_err());
    }

    #[test]
    fn invalid_specs() {
        let spaces = ProductSpace::uniform(Euclidean::new(1), 2).unwrap();
        let x = ProductPoint(vec![e1(1.0), e1(2.0)]);
        let psi = ProductPoint::replicate(&e1(0.0), 2);
        let bad = [
            ShrinkageSpec::james_stein(Variance::Common(0.0), Target::Fixed(psi.clone())),
            ShrinkageSpec::james_stein(Variance::PerGroup(vec![1.0]), Target::Fixed(psi.clone())),
            ShrinkageSpec {
                variance: Variance::Common(1.0),
                target: Target::Fixed(psi.clone()),
                weight: WeightRule::AlphaScaled(1.5),
            },
            ShrinkageSpec {
                variance: Variance::Common(1.0),
                target: Target::Fixed(psi),
                weight: WeightRule::Fixed(-0.1),
            },
        ];
        for spec in &bad {
            assert!(geodesic_js(&spaces, &x, spec).is_err());
        }
    }

    fn arb_groups(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, n)
    }

    proptest! {
        #[test]
        fn weight_monotonicity(s in 0.0f64..10.0, d in 0.0f64..10.0, ds in 0.0f64..5.0) {
            prop_assert!(js_weight(s, d + ds).unwrap() <= js_weight(s, d).unwrap());
            prop_assert!(js_weight(s + ds, d).unwrap() >= js_weight(s, d).unwrap());
        }

        #[test]
        fn estimate_lies_on_geodesic(x in arb_groups(5), p in arb_groups(5), s in 0.01f64..4.0) {
            let spaces = ProductSpace::uniform(Euclidean::new(1), 5).unwrap();
            let x = ProductPoint(x.into_iter().map(e1).collect());
            let psi = ProductPoint(p.into_iter().map(e1).collect());
            let est = geodesic_js(&spaces, &x, &ShrinkageSpec::james_stein(Variance::Common(s), Target::Fixed(psi.clone()))).unwrap();
            let lhs = spaces.product_distance(&x, &est.points).unwrap() + spaces.product_distance(&est.points, &psi).unwrap();
            prop_assert!((lhs - spaces.product_distance(&x, &psi).unwrap()).abs() <= 1e-9);
        }

        #[test]
        fn positive_part_relation(x in arb_groups(6), p in arb_groups(6), s in 0.01f64..4.0) {
            let n = 6.0;
            let spaces = ProductSpace::uniform(Euclidean::new(1), 6).unwrap();
            let xp = ProductPoint(x.iter().copied().map(e1).collect());
            let psi = ProductPoint(p.iter().copied().map(e1).collect());
            let spec = ShrinkageSpec::james_stein(Variance::Common(s * (n - 2.0) / n), Target::Fixed(psi));
            let est = geodesic_js(&spaces, &xp, &spec).unwrap();
            let pp = positive_part_js(&EuclideanPoint(x), &EuclideanPoint(p), s).unwrap();
            for (a, b) in est.points.iter().zip(pp.point.coords()) {
                prop_assert!((a.coords()[0] - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn loss_within_certificate(x in arb_groups(4), t in arb_groups(4), p in arb_groups(4), s in 0.01f64..4.0) {
            let spaces = ProductSpace::uniform(Euclidean::new(1), 4).unwrap();
            let x = ProductPoint(x.into_iter().map(e1).collect());
            let theta = ProductPoint(t.into_iter().map(e1).collect());
            let psi = ProductPoint(p.into_iter().map(e1).collect());
            let est = geodesic_js(&spaces, &x, &ShrinkageSpec::james_stein(Variance::Common(s), Target::Fixed(psi))).unwrap();
            let cert = loss_certificate(&spaces, &x, &theta, &est).unwrap();
            let loss = spaces.dist2(&est.points, &theta).unwrap();
            prop_assert!(loss <= cert.total() + 1e-9 * cert.scale);
            prop_assert!((cert.total() - cert.cat0).abs() <= 1e-9 * cert.scale);
        }
    }
}
