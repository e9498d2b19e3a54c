//! Principal-component factor analysis with varimax rotation.
//!
//! Loadings come from the eigendecomposition of the Pearson correlation
//! matrix of the occurrence columns: factor `j` has loadings
//! `vⱼ · √λⱼ`. Each loadings column is sign-normalized so its
//! largest-magnitude entry is positive.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{eigen_symmetric, normalize_column_signs, EigenError, SymmetricEigen};
use crate::matrix::OccurrenceMatrix;
use crate::proximity::{pearson_columns, ProximityError};

/// Sweep cap for varimax.
pub const VARIMAX_MAX_SWEEPS: usize = 100;
/// Default tolerance on the change of the varimax criterion between sweeps.
pub const VARIMAX_TOLERANCE: f64 = 1e-6;
/// Loadings below this magnitude are blanked in the formatted table.
pub const DISPLAY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("requested {requested} factors from {variables} variables")]
    TooManyFactors { requested: usize, variables: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("varimax did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// How many factors to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorCount {
    Fixed(usize),
    /// Kaiser criterion: every eigenvalue above 1 (at least one factor).
    Kaiser,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    None,
    Varimax,
}

/// Variables × factors loadings.
#[derive(Debug, Clone)]
pub struct LoadingsMatrix {
    pub variable_labels: Vec<String>,
    pub loadings: DMatrix<f64>,
    /// All `p` eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Per retained factor: `100 · (column sum of squared loadings) / p`.
    pub explained_variance_pct: Vec<f64>,
    pub rotation: Rotation,
    pub rotation_iterations: usize,
}

impl LoadingsMatrix {
    pub fn n_factors(&self) -> usize {
        self.loadings.ncols()
    }

    /// Row sums of squared loadings.
    pub fn communalities(&self) -> Vec<f64> {
        self.loadings.row_iter().map(|r| r.norm_squared()).collect()
    }

    /// CSV with a header of factor names and one labeled row per variable.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["variable".to_string()];
        header.extend((1..=self.n_factors()).map(|j| format!("factor_{j}")));
        w.write_record(&header).expect("in-memory write");
        for (i, label) in self.variable_labels.iter().enumerate() {
            let mut row = vec![label.clone()];
            row.extend(self.loadings.row(i).iter().map(|v| v.to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Fixed-width table with loadings below `threshold` left blank,
    /// followed by the variance explained by each factor.
    pub fn format_table(&self, threshold: f64) -> String {
        let width = self.variable_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0).max(8);
        let mut out = String::new();
        let title = match self.rotation {
            Rotation::None => "Component Matrix",
            Rotation::Varimax => "Rotated Component Matrix",
        };
        let _ = writeln!(out, "{title}");
        let _ = write!(out, "{:width$}", "");
        for j in 1..=self.n_factors() {
            let _ = write!(out, " {:>8}", j);
        }
        out.push('\n');
        for (i, label) in self.variable_labels.iter().enumerate() {
            let _ = write!(out, "{label:width$}");
            for v in self.loadings.row(i).iter() {
                if v.abs() < threshold {
                    let _ = write!(out, " {:>8}", "");
                } else {
                    let _ = write!(out, " {:>8.3}", v);
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "{:width$}", "% var");
        for v in &self.explained_variance_pct {
            let _ = write!(out, " {:>8.2}", v);
        }
        out.push('\n');
        out.push_str("Extraction Method: Principal Component Analysis.\n");
        if self.rotation == Rotation::Varimax {
            let _ = writeln!(out, "Rotation Method: Varimax. Rotation converged in {} iterations.", self.rotation_iterations);
        }
        out
    }
}

fn explained_pct(loadings: &DMatrix<f64>) -> Vec<f64> {
    let p = loadings.nrows() as f64;
    loadings.column_iter().map(|c| 100.0 * c.norm_squared() / p).collect()
}

/// Loadings of the leading factors of a correlation matrix.
pub fn pca_from_correlation(
    labels: &[String],
    correlation: &DMatrix<f64>,
    n_factors: FactorCount,
) -> Result<LoadingsMatrix, FactorError> {
    let p = correlation.nrows();
    let SymmetricEigen { values, vectors, .. } = eigen_symmetric(correlation)?;
    let m = match n_factors {
        FactorCount::Fixed(m) => m,
        FactorCount::Kaiser => values.iter().filter(|&&l| l > 1.0).count().max(1),
    };
    if m == 0 {
        return Err(FactorError::InvalidArgument("at least one factor is required".into()));
    }
    if m > p {
        return Err(FactorError::TooManyFactors { requested: m, variables: p });
    }
    let mut loadings = DMatrix::from_fn(p, m, |i, j| vectors[(i, j)] * values[j].max(0.0).sqrt());
    normalize_column_signs(&mut loadings);
    Ok(LoadingsMatrix {
        variable_labels: labels.to_vec(),
        explained_variance_pct: explained_pct(&loadings),
        loadings,
        eigenvalues: values,
        rotation: Rotation::None,
        rotation_iterations: 0,
    })
}

/// Principal-component extraction from the column correlations of an
/// occurrence matrix.
pub fn pca_from_occurrence(a: &OccurrenceMatrix, n_factors: FactorCount) -> Result<LoadingsMatrix, FactorError> {
    let r = pearson_columns(a)?;
    pca_from_correlation(a.col_labels(), r.values(), n_factors)
}

/// Varimax criterion `Σⱼ [ Σᵢ lᵢⱼ⁴ / p − (Σᵢ lᵢⱼ² / p)² ]`.
pub fn varimax_criterion(loadings: &DMatrix<f64>) -> f64 {
    let p = loadings.nrows() as f64;
    loadings
        .column_iter()
        .map(|c| {
            let s2: f64 = c.iter().map(|v| v * v).sum::<f64>() / p;
            let s4: f64 = c.iter().map(|v| v.powi(4)).sum::<f64>() / p;
            s4 - s2 * s2
        })
        .sum()
}

/// Orthogonal rotation and criterion trace from a varimax run.
#[derive(Debug, Clone)]
pub struct VarimaxTrace {
    /// `T` with rotated = original · `T`.
    pub rotation: DMatrix<f64>,
    /// Criterion before the first sweep and after each sweep, measured on the
    /// matrix actually being rotated (row-normalized under Kaiser).
    pub criterion_history: Vec<f64>,
}

/// Varimax rotation by successive planar rotations of factor pairs.
pub fn varimax(l: &LoadingsMatrix, kaiser_normalize: bool, tol: f64) -> Result<LoadingsMatrix, FactorError> {
    varimax_traced(l, kaiser_normalize, tol).map(|(l, _)| l)
}

/// [`varimax`], also returning the rotation matrix and criterion history.
pub fn varimax_traced(
    l: &LoadingsMatrix,
    kaiser_normalize: bool,
    tol: f64,
) -> Result<(LoadingsMatrix, VarimaxTrace), FactorError> {
    let (p, m) = l.loadings.shape();
    if m < 2 {
        return Err(FactorError::InvalidArgument("varimax needs at least two factors".into()));
    }
    if !(tol > 0.0) {
        return Err(FactorError::InvalidArgument("tolerance must be positive".into()));
    }
    let row_norms: Vec<f64> = (0..p).map(|i| l.loadings.row(i).norm()).collect();
    let mut work = l.loadings.clone();
    if kaiser_normalize {
        for (i, &h) in row_norms.iter().enumerate() {
            if h > 0.0 {
                work.row_mut(i).unscale_mut(h);
            }
        }
    }

    let pf = p as f64;
    let mut t = DMatrix::<f64>::identity(m, m);
    let mut criterion = varimax_criterion(&work);
    let mut history = vec![criterion];
    let mut sweeps = 0;
    loop {
        if sweeps == VARIMAX_MAX_SWEEPS {
            return Err(FactorError::NoConvergence { sweeps });
        }
        sweeps += 1;
        for j in 0..m {
            for k in (j + 1)..m {
                let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
                for i in 0..p {
                    let x = work[(i, j)];
                    let y = work[(i, k)];
                    let u = x * x - y * y;
                    let v = 2.0 * x * y;
                    a += u;
                    b += v;
                    c += u * u - v * v;
                    d += 2.0 * u * v;
                }
                let num = d - 2.0 * a * b / pf;
                let den = c - (a * a - b * b) / pf;
                let phi = 0.25 * num.atan2(den);
                if phi.abs() < 1e-15 {
                    continue;
                }
                let (s, co) = phi.sin_cos();
                for i in 0..p {
                    let x = work[(i, j)];
                    let y = work[(i, k)];
                    work[(i, j)] = x * co + y * s;
                    work[(i, k)] = -x * s + y * co;
                }
                for i in 0..m {
                    let x = t[(i, j)];
                    let y = t[(i, k)];
                    t[(i, j)] = x * co + y * s;
                    t[(i, k)] = -x * s + y * co;
                }
            }
        }
        let next = varimax_criterion(&work);
        history.push(next);
        let change = next - criterion;
        criterion = next;
        if change.abs() < tol {
            break;
        }
    }

    if kaiser_normalize {
        for (i, &h) in row_norms.iter().enumerate() {
            if h > 0.0 {
                work.row_mut(i).scale_mut(h);
            }
        }
    }
    let flipped = normalize_column_signs(&mut work);
    for (j, f) in flipped.into_iter().enumerate() {
        if f {
            t.column_mut(j).neg_mut();
        }
    }
    let rotated = LoadingsMatrix {
        variable_labels: l.variable_labels.clone(),
        explained_variance_pct: explained_pct(&work),
        loadings: work,
        eigenvalues: l.eigenvalues.clone(),
        rotation: Rotation::Varimax,
        rotation_iterations: sweeps,
    };
    Ok((rotated, VarimaxTrace { rotation: t, criterion_history: history }))
}

/// Positions of the variables in the space of the first `dims` factors.
pub fn factor_scatter_coords(l: &LoadingsMatrix, dims: usize) -> Result<Vec<Vec<f64>>, FactorError> {
    if !(dims == 2 || dims == 3) {
        return Err(FactorError::InvalidArgument(format!("scatter dimensions must be 2 or 3, got {dims}")));
    }
    if l.n_factors() < dims {
        return Err(FactorError::InvalidArgument(format!("{dims} dimensions requested from {} factors", l.n_factors())));
    }
    Ok(l.loadings.row_iter().map(|r| r.iter().take(dims).copied().collect()).collect())
}
