//! Proximity measures derived from an occurrence matrix, and conversion
//! between similarity and dissimilarity.
//!
//! Column-wise measures treat each attribute (cited author) as a variable
//! observed over the citing documents. Pearson correlations use the
//! population form (divide by `n` in covariance and both variances; the
//! ratio equals the sample form).

use log::warn;
use nalgebra::DMatrix;
use thiserror::Error;

use crate::matrix::{MeasurementLevel, OccurrenceMatrix, ProximityKind, ProximityMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProximityError {
    #[error("column {0:?} has zero variance; its correlation is undefined")]
    ZeroVarianceColumn(String),
    #[error("column {0:?} is all zeros; its cosine is undefined")]
    ZeroNormColumn(String),
    #[error("entry ({i}, {j}) = {value} is outside [-1, 1]")]
    OutOfRange { i: usize, j: usize, value: f64 },
    #[error("constant {constant} is smaller than similarity {value} at ({i}, {j})")]
    NegativeResult { i: usize, j: usize, value: f64, constant: f64 },
    #[error("expected a {expected} matrix, got {found}")]
    WrongKind { expected: ProximityKind, found: ProximityKind },
    #[error("entry ({i}, {j}) is missing")]
    MissingValue { i: usize, j: usize },
}

/// Similarity measures between attribute columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMeasure {
    Pearson,
    /// Pearson followed by `(r + 1) / 2`.
    PearsonShifted,
    Cosine,
    Jaccard,
}

impl SimilarityMeasure {
    pub fn apply(self, a: &OccurrenceMatrix) -> Result<ProximityMatrix, ProximityError> {
        match self {
            SimilarityMeasure::Pearson => pearson_columns(a),
            SimilarityMeasure::PearsonShifted => shift_pearson(&pearson_columns(a)?),
            SimilarityMeasure::Cosine => cosine_columns(a),
            SimilarityMeasure::Jaccard => Ok(jaccard_columns(a)),
        }
    }
}

/// Constant used by [`to_dissimilarity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DissimilarityConstant {
    /// Largest entry of the matrix, diagonal included.
    Auto,
    Fixed(f64),
}

fn similarity(labels: &[String], values: DMatrix<f64>) -> ProximityMatrix {
    ProximityMatrix::from_parts_unchecked(labels.to_vec(), values, ProximityKind::Similarity, MeasurementLevel::Ratio)
}

/// Column-pairwise Pearson correlation over the rows of `data`.
fn correlate_columns(data: &DMatrix<f64>, labels: &[String]) -> Result<DMatrix<f64>, ProximityError> {
    let (n, p) = data.shape();
    let n_f = n as f64;
    let mut centered = data.clone();
    let mut norms = Vec::with_capacity(p);
    for j in 0..p {
        let mean = data.column(j).sum() / n_f;
        let mut col = centered.column_mut(j);
        col.add_scalar_mut(-mean);
        let ss = col.norm_squared();
        // variance relative to the column's magnitude, so exact constants are caught
        let scale = data.column(j).amax().max(1.0);
        if ss <= (n_f * scale * scale) * 1e-24 {
            return Err(ProximityError::ZeroVarianceColumn(labels[j].clone()));
        }
        norms.push(ss.sqrt());
    }
    let mut r = DMatrix::<f64>::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = (centered.column(i).dot(&centered.column(j)) / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    Ok(r)
}

/// Pearson r between every pair of attribute columns; unit diagonal.
pub fn pearson_columns(a: &OccurrenceMatrix) -> Result<ProximityMatrix, ProximityError> {
    let r = correlate_columns(&a.to_f64(), a.col_labels())?;
    Ok(similarity(a.col_labels(), r))
}

/// Maps correlations from `[-1, 1]` onto `[0, 1]` with `(r + 1) / 2`.
pub fn shift_pearson(r: &ProximityMatrix) -> Result<ProximityMatrix, ProximityError> {
    let n = r.len();
    let mut out = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = r.get(i, j);
            if v.is_nan() {
                return Err(ProximityError::MissingValue { i, j });
            }
            if v.abs() > 1.0 + 1e-12 {
                return Err(ProximityError::OutOfRange { i, j, value: v });
            }
            if i != j {
                out[(i, j)] = (v.clamp(-1.0, 1.0) + 1.0) / 2.0;
            }
        }
    }
    Ok(similarity(r.labels(), out).with_level(r.level()))
}

/// Cosine of the angle between attribute columns; unit diagonal.
pub fn cosine_columns(a: &OccurrenceMatrix) -> Result<ProximityMatrix, ProximityError> {
    let data = a.to_f64();
    let p = a.n_attrs();
    let norms: Vec<f64> = (0..p).map(|j| data.column(j).norm()).collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(ProximityError::ZeroNormColumn(a.col_labels()[j].clone()));
    }
    let mut out = DMatrix::<f64>::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = (data.column(i).dot(&data.column(j)) / (norms[i] * norms[j])).min(1.0);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(similarity(a.col_labels(), out))
}

/// Jaccard index of the column supports (documents with count > 0).
/// `0/0` is defined as 0; an attribute with empty support gets a zero
/// diagonal and a logged warning.
pub fn jaccard_columns(a: &OccurrenceMatrix) -> ProximityMatrix {
    let p = a.n_attrs();
    let support: Vec<Vec<bool>> = (0..p).map(|j| (0..a.n_docs()).map(|d| a.get(d, j) > 0).collect()).collect();
    let mut out = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let (mut inter, mut union) = (0usize, 0usize);
            for (x, y) in support[i].iter().zip(&support[j]) {
                inter += usize::from(*x && *y);
                union += usize::from(*x || *y);
            }
            let v = if union == 0 { 0.0 } else { inter as f64 / union as f64 };
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        if out[(i, i)] == 0.0 {
            warn!("attribute {:?} never occurs; its Jaccard self-similarity is set to 0", a.col_labels()[i]);
        }
    }
    similarity(a.col_labels(), out)
}

/// Euclidean distance between attribute columns.
pub fn euclidean_columns(a: &OccurrenceMatrix) -> ProximityMatrix {
    let data = a.to_f64();
    let p = a.n_attrs();
    let mut out = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = (data.column(i) - data.column(j)).norm();
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    ProximityMatrix::from_parts_unchecked(
        a.col_labels().to_vec(),
        out,
        ProximityKind::Dissimilarity,
        MeasurementLevel::Ratio,
    )
}

/// Turns similarities upside down: `constant − s` off the diagonal, zero on
/// it. Missing entries stay missing.
pub fn to_dissimilarity(s: &ProximityMatrix, constant: DissimilarityConstant) -> Result<ProximityMatrix, ProximityError> {
    if s.kind() != ProximityKind::Similarity {
        return Err(ProximityError::WrongKind { expected: ProximityKind::Similarity, found: s.kind() });
    }
    let n = s.len();
    let c = match constant {
        DissimilarityConstant::Fixed(c) => c,
        DissimilarityConstant::Auto => s.values().iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max),
    };
    let mut out = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = s.get(i, j);
            if v.is_nan() {
                out[(i, j)] = f64::NAN;
            } else if v > c {
                return Err(ProximityError::NegativeResult { i, j, value: v, constant: c });
            } else {
                out[(i, j)] = c - v;
            }
        }
    }
    Ok(ProximityMatrix::from_parts_unchecked(s.labels().to_vec(), out, ProximityKind::Dissimilarity, s.level()))
}

/// Pearson correlation between the columns of a proximity matrix, diagonal
/// included as data.
///
/// This is the common but unsound practice of correlating a matrix that
/// already holds proximities. It normalizes each profile to its own mean
/// and distorts the geometry the proximities describe; it is provided to
/// demonstrate that distortion, not as a recommended measure.
pub fn pearson_of_proximities(p: &ProximityMatrix) -> Result<ProximityMatrix, ProximityError> {
    let n = p.len();
    for i in 0..n {
        for j in 0..n {
            if p.get(i, j).is_nan() {
                return Err(ProximityError::MissingValue { i, j });
            }
        }
    }
    let r = correlate_columns(p.values(), p.labels())?;
    Ok(similarity(p.labels(), r))
}
