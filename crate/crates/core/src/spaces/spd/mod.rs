//! Symmetric positive definite matrices under the log-Euclidean metric.
//!
//! `log` maps SPD(k) isometrically onto the symmetric matrices with the
//! Frobenius inner product, so every geometric operation is carried out on
//! the log image and mapped back with `exp`.

mod linalg;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry::{check_unit_interval, GeodesicSpace, SampleMean, Tolerance, WeightedDataset};

/// Symmetry tolerance for incoming matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted by [`spd_log`].
pub const NEAR_SINGULAR: f64 = 1e-13;

/// A real symmetric matrix, the tangent/log image of SPD(k).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accepts a square matrix whose asymmetry is below [`SYMMETRY_TOL`] and
    /// stores its symmetric part.
    pub fn new(mut m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeoError::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(GeoError::domain("matrix has non-finite entries"));
        }
        let asym = linalg::max_asymmetry(&m);
        if asym >= SYMMETRY_TOL {
            return Err(GeoError::NotSymmetric(asym));
        }
        linalg::symmetrize(&mut m);
        Ok(SymMatrix(m))
    }

    pub fn from_row_slice(k: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != k * k {
            return Err(GeoError::Dimension {
                expected: k * k,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(k, k, entries))
    }

    pub fn zeros(k: usize) -> Self {
        SymMatrix(DMatrix::zeros(k, k))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            diag,
        )))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix(&self.0 * a)
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &other.0)
    }

    /// `(1-t) self + t other`.
    pub fn lerp(&self, other: &SymMatrix, t: f64) -> SymMatrix {
        SymMatrix(&self.0 * (1.0 - t) + &other.0 * t)
    }
}

/// Eigenvalues (descending) and orthonormal eigenvectors (columns).
pub fn sym_eigen(m: &SymMatrix) -> (Vec<f64>, DMatrix<f64>) {
    linalg::jacobi_eigen(&m.0)
}

/// A point of SPD(k). The matrix logarithm is computed once at construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SpdPoint {
    mat: DMatrix<f64>,
    log: SymMatrix,
}

impl SpdPoint {
    /// Validates symmetry and positive definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let sym = SymMatrix::new(m)?;
        let (vals, vecs) = sym_eigen(&sym);
        let min = *vals
            .last()
            .ok_or_else(|| GeoError::domain("empty matrix"))?;
        if min <= 0.0 {
            return Err(GeoError::NotPositiveDefinite);
        }
        if min <= NEAR_SINGULAR {
            return Err(GeoError::NearSingular(min));
        }
        let log = SymMatrix(linalg::spectral_map(&vals, &vecs, f64::ln));
        Ok(SpdPoint { mat: sym.0, log })
    }

    pub fn from_row_slice(k: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != k * k {
            return Err(GeoError::Dimension {
                expected: k * k,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(k, k, entries))
    }

    /// Row-major nested literal, as used in configuration files.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(GeoError::domain("empty matrix literal"));
        }
        let mut flat = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(GeoError::Dimension {
                    expected: k,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(k, &flat)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let k = self.dim();
        (0..k)
            .map(|i| (0..k).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }

    pub fn identity(k: usize) -> Self {
        SpdPoint {
            mat: DMatrix::identity(k, k),
            log: SymMatrix::zeros(k),
        }
    }

    /// `c I`, with `c > 0`.
    pub fn scaled_identity(k: usize, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(GeoError::domain("scale must be positive"));
        }
        Ok(SpdPoint {
            mat: DMatrix::identity(k, k) * c,
            log: SymMatrix(DMatrix::identity(k, k) * c.ln()),
        })
    }

    /// The point `B B^T` for a square factor `B`. The logarithm comes from the
    /// singular values of `B`, which stay accurate when `B B^T` is badly
    /// conditioned.
    pub fn from_factor(b: &DMatrix<f64>) -> Result<Self> {
        if b.nrows() != b.ncols() {
            return Err(GeoError::Dimension {
                expected: b.nrows(),
                got: b.ncols(),
            });
        }
        let (vals, vecs) = linalg::gram_eigen(b);
        let min = *vals
            .last()
            .ok_or_else(|| GeoError::domain("empty matrix"))?;
        if !(min > 0.0) {
            return Err(GeoError::NotPositiveDefinite);
        }
        let mut mat = b * b.transpose();
        linalg::symmetrize(&mut mat);
        let log = SymMatrix(linalg::spectral_map(&vals, &vecs, f64::ln));
        Ok(SpdPoint { mat, log })
    }

    /// `exp(S)`; the stored logarithm is `S` itself.
    pub fn from_log(s: SymMatrix) -> Self {
        let (vals, vecs) = sym_eigen(&s);
        let mat = linalg::spectral_map(&vals, &vecs, f64::exp);
        SpdPoint { mat, log: s }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn log(&self) -> &SymMatrix {
        &self.log
    }

    /// `Q A Q^T`.
    pub fn congruence(&self, q: &DMatrix<f64>) -> Result<Self> {
        Self::new(q * &self.mat * q.transpose())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SpdPoint {
    type Error = GeoError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SpdPoint::from_rows(&rows)
    }
}

impl From<SpdPoint> for Vec<Vec<f64>> {
    fn from(p: SpdPoint) -> Self {
        p.to_rows()
    }
}

pub fn spd_log(a: &SpdPoint) -> SymMatrix {
    a.log.clone()
}

pub fn spd_exp(s: &SymMatrix) -> SpdPoint {
    SpdPoint::from_log(s.clone())
}

pub fn spd_distance(a: &SpdPoint, b: &SpdPoint) -> f64 {
    (&a.log.0 - &b.log.0).norm()
}

pub fn spd_interpolate(a: &SpdPoint, b: &SpdPoint, t: f64) -> Result<SpdPoint> {
    check_unit_interval(t)?;
    check_same_dim(a, b)?;
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    Ok(SpdPoint::from_log(a.log.lerp(&b.log, t)))
}

/// Weighted log-Euclidean mean `exp(Σ w_i log X_i / Σ w_i)`.
pub fn spd_frechet_mean(data: &WeightedDataset<SpdPoint>) -> Result<SpdPoint> {
    let k = data.points()[0].dim();
    let mut acc = DMatrix::<f64>::zeros(k, k);
    for (p, w) in data.iter() {
        if p.dim() != k {
            return Err(GeoError::Dimension {
                expected: k,
                got: p.dim(),
            });
        }
        acc += &p.log.0 * w;
    }
    acc /= data.total_weight();
    Ok(SpdPoint::from_log(SymMatrix(acc)))
}

fn check_same_dim(a: &SpdPoint, b: &SpdPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GeoError::Dimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// SPD(k) with the log-Euclidean metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spd {
    pub k: usize,
}

impl Spd {
    pub fn new(k: usize) -> Self {
        Spd { k }
    }
}

impl GeodesicSpace for Spd {
    type Point = SpdPoint;

    fn distance(&self, a: &SpdPoint, b: &SpdPoint) -> f64 {
        spd_distance(a, b)
    }

    fn interpolate(&self, a: &SpdPoint, b: &SpdPoint, t: f64) -> SpdPoint {
        spd_interpolate(a, b, t).expect("interpolate: invalid SPD arguments")
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl SampleMean for Spd {
    fn sample_mean(&self, data: &WeightedDataset<SpdPoint>) -> Result<SpdPoint> {
        spd_frechet_mean(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{brute_force_frechet_mean, cat0_slack, frechet_functional};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn diag(d: &[f64]) -> SpdPoint {
        SpdPoint::new(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            d,
        )))
        .unwrap()
    }

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn arb_spd() -> impl Strategy<Value = SpdPoint> {
        prop::collection::vec(-1.5f64..1.5, 9).prop_map(|v| {
            let b = DMatrix::from_row_slice(3, 3, &v) + DMatrix::identity(3, 3) * 0.3;
            let m = &b * b.transpose() + DMatrix::identity(3, 3) * 0.05;
            SpdPoint::new(m).unwrap()
        })
    }

    fn arb_orthogonal() -> impl Strategy<Value = DMatrix<f64>> {
        prop::collection::vec(-1.0f64..1.0, 9).prop_map(|v| {
            let m = DMatrix::from_row_slice(3, 3, &v) + DMatrix::identity(3, 3) * 2.0;
            m.qr().q()
        })
    }

    #[test]
    fn eigen_of_identity_and_diagonal() {
        let (vals, _) =
            sym_eigen(&SymMatrix::zeros(3).add(&SymMatrix::from_diagonal(&[1.0, 1.0, 1.0])));
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        let (vals, vecs) = sym_eigen(&SymMatrix::from_diagonal(&[1.0, 4.0]));
        assert_eq!(vals, vec![4.0, 1.0]);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((vecs[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(
            SymMatrix::new(asym),
            Err(GeoError::NotSymmetric(_))
        ));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            SpdPoint::new(indefinite),
            Err(GeoError::NotPositiveDefinite)
        ));
        assert!(matches!(
            SpdPoint::from_row_slice(2, &[1.0, 0.0, 0.0, 1e-14]),
            Err(GeoError::NearSingular(_))
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrised() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5 + 1e-12, 1.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)]);
    }

    #[test]
    fn log_examples() {
        assert!(spd_log(&SpdPoint::identity(3)).frobenius() == 0.0);
        let l = spd_log(&diag(&[E, 1.0, 1.0]));
        assert!(close(
            l.matrix(),
            SymMatrix::from_diagonal(&[1.0, 0.0, 0.0]).matrix(),
            1e-14
        ));
    }

    #[test]
    fn distance_and_midpoint_examples() {
        let i = SpdPoint::identity(3);
        let b = diag(&[E * E, 1.0, 1.0]);
        assert_eq!(spd_distance(&i, &i), 0.0);
        assert!((spd_distance(&i, &b) - 2.0).abs() < 1e-14);
        let mid = spd_interpolate(&i, &b, 0.5).unwrap();
        assert!(close(mid.matrix(), diag(&[E, 1.0, 1.0]).matrix(), 1e-13));
        assert!(close(
            spd_interpolate(&i, &b, 0.0).unwrap().matrix(),
            i.matrix(),
            0.0
        ));
        let mean = spd_frechet_mean(&WeightedDataset::uniform(vec![i.clone(), b.clone()]).unwrap())
            .unwrap();
        assert!(close(mean.matrix(), mid.matrix(), 1e-13));
    }

    #[test]
    fn mean_of_identical_points() {
        let a = SpdPoint::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        let m = spd_frechet_mean(&WeightedDataset::uniform(vec![a.clone(); 4]).unwrap()).unwrap();
        assert!(close(m.matrix(), a.matrix(), 1e-12));
    }

    #[test]
    fn json_rows_roundtrip() {
        let a: SpdPoint = serde_json::from_str("[[2.0, 0.5], [0.5, 1.0]]").unwrap();
        assert_eq!(a.matrix()[(0, 1)], 0.5);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, "[[2.0,0.5],[0.5,1.0]]");
        assert!(serde_json::from_str::<SpdPoint>("[[1.0, 2.0], [2.0, 1.0]]").is_err());
    }

    #[test]
    fn closed_form_mean_beats_perturbation_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let space = Spd::new(3);
        for _ in 0..20 {
            let pts: Vec<SpdPoint> = (0..3)
                .map(|_| {
                    let v: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let b = DMatrix::from_row_slice(3, 3, &v) + DMatrix::identity(3, 3);
                    SpdPoint::new(&b * b.transpose() + DMatrix::identity(3, 3) * 0.1).unwrap()
                })
                .collect();
            let weights: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.0)).collect();
            let data = WeightedDataset::new(pts, weights).unwrap();
            let closed = spd_frechet_mean(&data).unwrap();
            // Grid in log coordinates along each of the six symmetric directions.
            let mut grid = vec![closed.clone()];
            for i in 0..3 {
                for j in i..3 {
                    for step in [-0.05, -0.01, -0.001, 0.001, 0.01, 0.05] {
                        let mut e = DMatrix::<f64>::zeros(3, 3);
                        e[(i, j)] = step;
                        e[(j, i)] = step;
                        grid.push(SpdPoint::from_log(closed.log().add(&SymMatrix(e))));
                    }
                }
            }
            let (best, _) = brute_force_frechet_mean(&space, &data, grid.iter()).unwrap();
            assert!(spd_distance(&best, &closed) == 0.0);
            let f = frechet_functional(&space, &data, &closed).unwrap();
            for g in &grid {
                assert!(f <= frechet_functional(&space, &data, g).unwrap() + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn eigen_reconstructs_and_is_orthonormal(v in prop::collection::vec(-5.0f64..5.0, 6)) {
            let m = SymMatrix::from_row_slice(3, &[v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5]]).unwrap();
            let (vals, u) = sym_eigen(&m);
            prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            let recon = linalg::spectral_map(&vals, &u, |x| x);
            prop_assert!((recon - m.matrix()).norm() <= 1e-10 * (1.0 + m.frobenius()));
            prop_assert!((u.transpose() * &u - DMatrix::identity(3, 3)).norm() <= 1e-10);
        }

        #[test]
        fn exp_log_roundtrip(a in arb_spd()) {
            let back = spd_exp(&spd_log(&a));
            prop_assert!((back.matrix() - a.matrix()).norm() <= 1e-9 * (1.0 + a.matrix().norm()));
        }

        #[test]
        fn metric_symmetry_and_speed(a in arb_spd(), b in arb_spd(), t in 0.0f64..1.0) {
            prop_assert!((spd_distance(&a, &b) - spd_distance(&b, &a)).abs() <= 1e-12);
            let p = spd_interpolate(&a, &b, t).unwrap();
            prop_assert!((spd_distance(&a, &p) - t * spd_distance(&a, &b)).abs() <= 1e-9);
        }

        #[test]
        fn flat_cat0_slack(a in arb_spd(), b in arb_spd(), c in arb_spd(), t in 0.0f64..1.0) {
            let s = cat0_slack(&Spd::new(3), &a, &b, &c, t).unwrap();
            prop_assert!(s.abs() <= 1e-8);
        }

        #[test]
        fn orthogonal_congruence_invariance(a in arb_spd(), b in arb_spd(), q in arb_orthogonal()) {
            let qa = a.congruence(&q).unwrap();
            let qb = b.congruence(&q).unwrap();
            prop_assert!((spd_distance(&qa, &qb) - spd_distance(&a, &b)).abs() <= 1e-9);
        }

        #[test]
        fn factor_construction_agrees(v in prop::collection::vec(-1.5f64..1.5, 9)) {
            let b = DMatrix::from_row_slice(3, 3, &v) + DMatrix::identity(3, 3) * 2.0;
            // Forming B B^T squares the condition number, so the direct path is
            // only a valid reference for well-conditioned factors.
            prop_assume!(b.singular_values().min() >= 0.5);
            let direct = SpdPoint::new(&b * b.transpose()).unwrap();
            let via = SpdPoint::from_factor(&b).unwrap();
            prop_assert!((direct.log().matrix() - via.log().matrix()).norm() <= 1e-9);
        }
    }
}
