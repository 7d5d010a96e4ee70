//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and matching orthonormal eigenvectors (columns)
/// of a symmetric matrix. Only the lower triangle is trusted to be symmetric
/// with the upper; callers symmetrise first.
pub(crate) fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Rotation angle from the stable tangent formula.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    sort_descending(values, v)
}

/// Eigendecomposition of `B B^T` from the factor `B`, by one-sided (Hestenes)
/// Jacobi orthogonalisation of the columns of `B`.
///
/// Small eigenvalues keep their relative accuracy, which forming `B B^T`
/// explicitly would destroy.
pub(crate) fn gram_eigen(b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = b.nrows();
    let cols = b.ncols();
    let mut u = b.clone();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    alpha += u[(k, p)] * u[(k, p)];
                    beta += u[(k, q)] * u[(k, q)];
                    gamma += u[(k, p)] * u[(k, q)];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let ukp = u[(k, p)];
                    let ukq = u[(k, q)];
                    u[(k, p)] = c * ukp - s * ukq;
                    u[(k, q)] = s * ukp + c * ukq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values = Vec::with_capacity(cols);
    let mut vecs = DMatrix::<f64>::zeros(n, cols);
    for j in 0..cols {
        let norm = u.column(j).norm();
        values.push(norm * norm);
        if norm > 0.0 {
            vecs.set_column(j, &(u.column(j) / norm));
        }
    }
    sort_descending(values, vecs)
}

fn sort_descending(values: Vec<f64>, vecs: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted_vals = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vecs = DMatrix::<f64>::zeros(vecs.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vecs.set_column(dst, &vecs.column(src));
    }
    (sorted_vals, sorted_vecs)
}

/// `U diag(f(λ)) U^T`.
pub(crate) fn spectral_map(
    values: &[f64],
    vecs: &DMatrix<f64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<f64> {
    let n = vecs.nrows();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let fl = f(lam);
        let col = vecs.column(k);
        for i in 0..n {
            let ci = col[i] * fl;
            for j in 0..n {
                out[(i, j)] += ci * col[j];
            }
        }
    }
    symmetrize(&mut out);
    out
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(values: &[f64], vecs: &DMatrix<f64>) -> DMatrix<f64> {
        spectral_map(values, vecs, |x| x)
    }

    #[test]
    fn jacobi_on_known_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0]);
        let (vals, vecs) = jacobi_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!((reconstruct(&vals, &vecs) - &m).norm() < 1e-12);
        let trace: f64 = vals.iter().sum();
        assert!((trace - 12.0).abs() < 1e-12);
    }

    #[test]
    fn gram_matches_explicit_product() {
        let b = DMatrix::from_row_slice(3, 3, &[1.5, 0.0, 0.0, -0.3, 0.8, 0.0, 2.0, 0.1, 0.4]);
        let w = &b * b.transpose();
        let (v1, u1) = gram_eigen(&b);
        let (v2, _) = jacobi_eigen(&w);
        for (a, c) in v1.iter().zip(&v2) {
            assert!((a - c).abs() < 1e-12 * (1.0 + c.abs()));
        }
        assert!((reconstruct(&v1, &u1) - &w).norm() < 1e-12);
    }

    #[test]
    fn gram_keeps_tiny_eigenvalues_accurate() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1e-9]);
        let (vals, _) = gram_eigen(&b);
        // det(B B^T) = 1e-18 and the larger eigenvalue is ~2.
        let product = vals[0] * vals[1];
        assert!((product - 1e-18).abs() < 1e-24);
        assert!(vals[1] > 0.0);
    }
}
