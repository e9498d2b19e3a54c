//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Sweep cap for the cyclic Jacobi method.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// norm of the input.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("matrix contains non-finite entries")]
    NotFinite,
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

/// Eigenvalues in descending order with matching unit eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

/// Diagonalizes a real symmetric matrix.
///
/// Symmetry is checked to within `1e-10` relative to the largest entry; the
/// upper triangle is then mirrored so tiny asymmetries do not leak into the
/// rotations.
pub fn eigen_symmetric(m: &DMatrix<f64>) -> Result<SymmetricEigen, EigenError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(EigenError::NotSquare { rows, cols });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NotFinite);
    }
    let n = rows;
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale.max(1.0) {
                return Err(EigenError::NotSymmetric { i, j });
            }
        }
    }
    let mut a = DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = OFF_DIAGONAL_THRESHOLD * a.norm();

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(EigenError::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // stable tangent of the rotation angle
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
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
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}

/// Flips each column so its largest-magnitude entry is positive.
pub(crate) fn normalize_column_signs(m: &mut DMatrix<f64>) -> Vec<bool> {
    let mut flipped = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let col = m.column(j);
        let mut best = 0.0f64;
        for &x in col.iter() {
            if x.abs() > best.abs() + 1e-12 {
                best = x;
            }
        }
        let flip = best < 0.0;
        if flip {
            m.column_mut(j).neg_mut();
        }
        flipped.push(flip);
    }
    flipped
}

/// Subtracts column means in place and returns them.
pub(crate) fn center_columns(m: &mut DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows().max(1) as f64;
    let means = DVector::from_fn(m.ncols(), |j, _| m.column(j).sum() / n);
    for j in 0..m.ncols() {
        m.column_mut(j).add_scalar_mut(-means[j]);
    }
    means
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let e = eigen_symmetric(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn two_by_two() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = eigen_symmetric(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        assert!((v0[0].abs() - h).abs() < 1e-12 && (v0[0] - v0[1]).abs() < 1e-12);
        let v1 = e.vectors.column(1);
        assert!((v1[0].abs() - h).abs() < 1e-12 && (v1[0] + v1[1]).abs() < 1e-12);
    }

    #[test]
    fn residuals_and_orthonormality() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[4.0, -2.0, 1.0, 0.5, -2.0, 3.0, 0.0, 1.0, 1.0, 0.0, 2.0, -1.0, 0.5, 1.0, -1.0, 1.0],
        );
        let e = eigen_symmetric(&m).unwrap();
        for k in 0..4 {
            let v = e.vectors.column(k);
            let r = &m * v - v * e.values[k];
            assert!(r.amax() < 1e-8 * m.norm());
        }
        let g = e.vectors.transpose() * &e.vectors;
        assert!((g - DMatrix::identity(4, 4)).amax() < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eigen_symmetric(&m), Err(EigenError::NotSymmetric { .. })));
        assert!(matches!(eigen_symmetric(&DMatrix::zeros(2, 3)), Err(EigenError::NotSquare { .. })));
    }

    #[test]
    fn sign_convention() {
        let mut m = DMatrix::from_row_slice(2, 2, &[0.1, 0.5, -0.9, 0.2]);
        normalize_column_signs(&mut m);
        assert_eq!(m[(1, 0)], 0.9);
        assert_eq!(m[(0, 1)], 0.5);
    }
}
