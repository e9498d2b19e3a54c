//! Torgerson classical scaling, used as the default SMACOF start.

use nalgebra::DMatrix;

use crate::linalg::{eigen_symmetric, EigenError};

/// Scale applied to axes whose eigenvalue is not positive, as a fraction of
/// the leading axis. A zero column would stay zero under Guttman updates.
const DEGENERATE_AXIS_FRACTION: f64 = 1e-3;

/// Top-`k` principal coordinates of a dissimilarity matrix.
///
/// Double-centers the squared dissimilarities, `B = −½ J D² J`, and returns
/// the leading `k` eigenvectors scaled by `√λ`. Axes with `λ ≤ 0` get the
/// eigenvector scaled to a small fraction of the first axis instead, so the
/// start keeps full rank. Missing (`NaN`) entries are replaced by the mean of
/// the observed off-diagonal entries before centering.
pub fn classical_init(d: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>, EigenError> {
    let n = d.nrows();
    let observed: Vec<f64> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| d[(i, j)]).filter(|v| !v.is_nan()).collect();
    let fill = if observed.is_empty() { 0.0 } else { observed.iter().sum::<f64>() / observed.len() as f64 };
    let sq = DMatrix::from_fn(n, n, |i, j| {
        let v = if i == j { 0.0 } else { d[(i, j)] };
        let v = if v.is_nan() { fill } else { v };
        v * v
    });
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = eigen_symmetric(&b)?;

    let lead = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let mut coords = DMatrix::<f64>::zeros(n, k);
    for a in 0..k.min(n) {
        let lambda = eig.values[a];
        let scale = if lambda > 0.0 { lambda.sqrt() } else { DEGENERATE_AXIS_FRACTION * lead.max(1.0) };
        coords.set_column(a, &(eig.vectors.column(a) * scale));
    }
    Ok(coords)
}
