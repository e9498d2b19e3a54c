//! Similarity Procrustes: translation, orthogonal transform (rotations and
//! reflections) and isotropic scale.

use nalgebra::DMatrix;

use super::MdsError;
use crate::linalg::center_columns;

/// Result of aligning one configuration onto another.
#[derive(Debug, Clone)]
pub struct Alignment {
    /// `Y` moved onto `X`: `scale · Yc · rotation + mean(X)`.
    pub aligned: DMatrix<f64>,
    pub rotation: DMatrix<f64>,
    pub scale: f64,
    /// `1 − residual / total sum of squares of centered X`, in `[0, 1]`.
    pub congruence: f64,
}

/// Aligns `y` onto the target `x` by least squares.
pub fn procrustes_align(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Alignment, MdsError> {
    if x.shape() != y.shape() {
        return Err(MdsError::ShapeMismatch {
            left: format!("{} x {}", x.nrows(), x.ncols()),
            right: format!("{} x {}", y.nrows(), y.ncols()),
        });
    }
    let mut xc = x.clone();
    let x_mean = center_columns(&mut xc);
    let mut yc = y.clone();
    center_columns(&mut yc);
    let x_ss = xc.norm_squared();
    let y_ss = yc.norm_squared();
    if x_ss <= f64::MIN_POSITIVE || y_ss <= f64::MIN_POSITIVE {
        return Err(MdsError::DegenerateConfiguration);
    }

    let cross = yc.transpose() * &xc;
    let svd = cross.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let rotation = u * v_t;
    let trace: f64 = svd.singular_values.iter().sum();
    let scale = trace / y_ss;

    let mut aligned = &yc * &rotation * scale;
    for j in 0..aligned.ncols() {
        aligned.column_mut(j).add_scalar_mut(x_mean[j]);
    }
    let residual = (x - &aligned).norm_squared();
    let congruence = (1.0 - residual / x_ss).clamp(0.0, 1.0);
    Ok(Alignment { aligned, rotation, scale, congruence })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DMatrix<f64> {
        DMatrix::from_row_slice(5, 2, &[0.0, 0.0, 1.0, 0.2, 0.3, 1.1, -0.7, 0.4, 0.5, -0.9])
    }

    #[test]
    fn rigid_rotation_is_perfect() {
        let x = sample();
        let (s, c) = 0.7f64.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let y = &x * r * 3.0;
        let a = procrustes_align(&x, &y).unwrap();
        assert!((a.congruence - 1.0).abs() < 1e-9);
        assert!((&a.aligned - &x).amax() < 1e-9);
    }

    #[test]
    fn reflection_is_perfect() {
        let x = sample();
        let mut y = x.clone();
        y.column_mut(0).neg_mut();
        let a = procrustes_align(&x, &y).unwrap();
        assert!((a.congruence - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_and_mismatched_inputs() {
        let x = sample();
        let flat = DMatrix::from_element(5, 2, 1.0);
        assert!(matches!(procrustes_align(&x, &flat), Err(MdsError::DegenerateConfiguration)));
        assert!(matches!(procrustes_align(&x, &DMatrix::zeros(4, 2)), Err(MdsError::ShapeMismatch { .. })));
    }
}
