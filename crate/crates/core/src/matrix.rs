//! Occurrence and co-occurrence matrices and the derivations between them.
//!
//! An [`OccurrenceMatrix`] is the asymmetric documents × attributes table
//! (citing documents in rows, cited authors or papers in columns). A
//! [`CooccurrenceMatrix`] is the symmetric attributes × attributes table of
//! pairwise counts. A [`ProximityMatrix`] is any symmetric real matrix that
//! can be handed to MDS, tagged with whether larger values mean "closer"
//! (similarity) or "further" (dissimilarity).

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

/// Tolerance used when checking a real matrix for symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },
    #[error("duplicate {axis} label {label:?}")]
    DuplicateLabel { axis: &'static str, label: String },
    #[error("occurrence matrix needs at least 1 document and 2 attributes, got {docs} x {attrs}")]
    TooSmall { docs: usize, attrs: usize },
    #[error("matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: String, b: String },
    #[error("diagonal entry {i} is {value} but the diagonal policy is zeroed")]
    NonZeroDiagonal { i: usize, value: u64 },
    #[error("dissimilarity entry ({i}, {j}) = {value} violates non-negativity / zero diagonal")]
    InvalidDissimilarity { i: usize, j: usize, value: f64 },
    #[error("entry ({i}, {j}) is not finite")]
    NotFinite { i: usize, j: usize },
    #[error("integer overflow computing entry ({i}, {j})")]
    Overflow { i: usize, j: usize },
}

/// What to put on the diagonal of a co-occurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalPolicy {
    /// Keep the natural value of `AᵀA` (documents containing the attribute).
    #[default]
    Raw,
    /// Force the diagonal to zero.
    Zeroed,
}

/// Whether larger proximities mean more alike or less alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProximityKind {
    Similarity,
    Dissimilarity,
}

/// Measurement level of a proximity, which selects the admissible
/// transformation in MDS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementLevel {
    #[default]
    Ratio,
    Interval,
    Ordinal,
}

impl fmt::Display for ProximityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProximityKind::Similarity => "similarity",
            ProximityKind::Dissimilarity => "dissimilarity",
        })
    }
}

impl fmt::Display for MeasurementLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementLevel::Ratio => "ratio",
            MeasurementLevel::Interval => "interval",
            MeasurementLevel::Ordinal => "ordinal",
        })
    }
}

fn check_unique(axis: &'static str, labels: &[String]) -> Result<(), MatrixError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(MatrixError::DuplicateLabel { axis, label: label.clone() });
        }
    }
    Ok(())
}

fn check_shape<T>(m: &DMatrix<T>, rows: usize, cols: usize) -> Result<(), MatrixError> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(MatrixError::Shape {
            expected: format!("{rows} x {cols}"),
            found: format!("{} x {}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// Documents × attributes count matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    counts: DMatrix<u64>,
}

impl OccurrenceMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, counts: DMatrix<u64>) -> Result<Self, MatrixError> {
        if rows.is_empty() || cols.len() < 2 {
            return Err(MatrixError::TooSmall { docs: rows.len(), attrs: cols.len() });
        }
        check_shape(&counts, rows.len(), cols.len())?;
        check_unique("document", &rows)?;
        check_unique("attribute", &cols)?;
        Ok(Self { rows, cols, counts })
    }

    /// Builds a matrix from row-major nested vectors.
    pub fn from_rows(rows: Vec<String>, cols: Vec<String>, data: &[Vec<u64>]) -> Result<Self, MatrixError> {
        let n_cols = cols.len();
        if let Some(bad) = data.iter().find(|r| r.len() != n_cols) {
            return Err(MatrixError::Shape {
                expected: format!("rows of length {n_cols}"),
                found: format!("row of length {}", bad.len()),
            });
        }
        let counts = DMatrix::from_fn(data.len(), n_cols, |i, j| data[i][j]);
        Self::new(rows, cols, counts)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attrs(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, doc: usize, attr: usize) -> u64 {
        self.counts[(doc, attr)]
    }

    /// Counts as reals, for the similarity measures.
    pub fn to_f64(&self) -> DMatrix<f64> {
        self.counts.map(|c| c as f64)
    }

    pub fn is_binary(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }
}

/// Symmetric attribute × attribute counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    labels: Vec<String>,
    counts: DMatrix<u64>,
    diagonal_policy: DiagonalPolicy,
}

impl CooccurrenceMatrix {
    pub fn new(labels: Vec<String>, counts: DMatrix<u64>, diagonal_policy: DiagonalPolicy) -> Result<Self, MatrixError> {
        let n = labels.len();
        check_shape(&counts, n, n)?;
        check_unique("attribute", &labels)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if counts[(i, j)] != counts[(j, i)] {
                    return Err(MatrixError::NotSymmetric {
                        i,
                        j,
                        a: counts[(i, j)].to_string(),
                        b: counts[(j, i)].to_string(),
                    });
                }
            }
            if diagonal_policy == DiagonalPolicy::Zeroed && counts[(i, i)] != 0 {
                return Err(MatrixError::NonZeroDiagonal { i, value: counts[(i, i)] });
            }
        }
        Ok(Self { labels, counts, diagonal_policy })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    pub fn diagonal_policy(&self) -> DiagonalPolicy {
        self.diagonal_policy
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[(i, j)]
    }

    /// Returns a copy with the diagonal rewritten per `policy`. Switching to
    /// `Raw` cannot restore counts that were zeroed, so it keeps the values.
    pub fn with_diagonal_policy(&self, policy: DiagonalPolicy) -> Self {
        let mut counts = self.counts.clone();
        if policy == DiagonalPolicy::Zeroed {
            counts.fill_diagonal(0);
        }
        Self { labels: self.labels.clone(), counts, diagonal_policy: policy }
    }

    /// Views the counts as a similarity matrix (more co-occurrences means
    /// closer), which is how co-citation data enters MDS directly.
    pub fn to_proximity(&self, level: MeasurementLevel) -> ProximityMatrix {
        ProximityMatrix {
            labels: self.labels.clone(),
            values: self.counts.map(|c| c as f64),
            kind: ProximityKind::Similarity,
            level,
        }
    }
}

/// Symmetric real-valued proximities. `NaN` marks a missing value, which
/// MDS gives zero weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    labels: Vec<String>,
    values: DMatrix<f64>,
    kind: ProximityKind,
    level: MeasurementLevel,
}

impl ProximityMatrix {
    pub fn new(
        labels: Vec<String>,
        values: DMatrix<f64>,
        kind: ProximityKind,
        level: MeasurementLevel,
    ) -> Result<Self, MatrixError> {
        let n = labels.len();
        check_shape(&values, n, n)?;
        check_unique("item", &labels)?;
        for i in 0..n {
            for j in 0..n {
                let v = values[(i, j)];
                if v.is_infinite() {
                    return Err(MatrixError::NotFinite { i, j });
                }
                if j > i {
                    let w = values[(j, i)];
                    let both_missing = v.is_nan() && w.is_nan();
                    if !both_missing && !((v - w).abs() <= SYMMETRY_TOLERANCE) {
                        return Err(MatrixError::NotSymmetric { i, j, a: v.to_string(), b: w.to_string() });
                    }
                }
                if kind == ProximityKind::Dissimilarity {
                    let bad = if i == j { v != 0.0 } else { v < 0.0 };
                    if bad {
                        return Err(MatrixError::InvalidDissimilarity { i, j, value: v });
                    }
                }
            }
        }
        Ok(Self { labels, values, kind, level })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kind(&self) -> ProximityKind {
        self.kind
    }

    pub fn level(&self) -> MeasurementLevel {
        self.level
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn with_level(mut self, level: MeasurementLevel) -> Self {
        self.level = level;
        self
    }

    /// Multiplies every entry by `factor` (> 0), keeping kind and level.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: &self.values * factor, ..self.clone() }
    }

    pub(crate) fn from_parts_unchecked(
        labels: Vec<String>,
        values: DMatrix<f64>,
        kind: ProximityKind,
        level: MeasurementLevel,
    ) -> Self {
        Self { labels, values, kind, level }
    }
}

/// Number of documents in which both attributes occur. Count-valued input is
/// binarized first, so a document contributes at most one to any pair.
pub fn cooccurrence(a: &OccurrenceMatrix, diagonal_policy: DiagonalPolicy) -> CooccurrenceMatrix {
    let n = a.n_attrs();
    let present = a.counts.map(|c| u64::from(c > 0));
    let mut counts = DMatrix::<u64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let shared = present.column(i).iter().zip(present.column(j).iter()).filter(|(x, y)| **x == 1 && **y == 1).count()
                as u64;
            counts[(i, j)] = shared;
            counts[(j, i)] = shared;
        }
    }
    if diagonal_policy == DiagonalPolicy::Zeroed {
        counts.fill_diagonal(0);
    }
    CooccurrenceMatrix { labels: a.cols.clone(), counts, diagonal_policy }
}

/// `AᵀA` on raw counts: the per-document product of occurrence counts,
/// summed over documents. The diagonal is the sum of squared counts.
pub fn affiliations(a: &OccurrenceMatrix) -> Result<CooccurrenceMatrix, MatrixError> {
    let n = a.n_attrs();
    let mut counts = DMatrix::<u64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut total: u64 = 0;
            for d in 0..a.n_docs() {
                let prod = a.counts[(d, i)].checked_mul(a.counts[(d, j)]).ok_or(MatrixError::Overflow { i, j })?;
                total = total.checked_add(prod).ok_or(MatrixError::Overflow { i, j })?;
            }
            counts[(i, j)] = total;
            counts[(j, i)] = total;
        }
    }
    Ok(CooccurrenceMatrix { labels: a.cols.clone(), counts, diagonal_policy: DiagonalPolicy::Raw })
}

/// Reduces every count to a 0/1 indicator, keeping the diagonal policy.
pub fn binarize(m: &CooccurrenceMatrix) -> CooccurrenceMatrix {
    CooccurrenceMatrix {
        labels: m.labels.clone(),
        counts: m.counts.map(|c| u64::from(c > 0)),
        diagonal_policy: m.diagonal_policy,
    }
}
