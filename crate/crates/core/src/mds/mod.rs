//! Multidimensional scaling by stress majorization (SMACOF) with ratio,
//! interval and ordinal transformations of the proximities.
//!
//! The fit criterion is normalized raw stress
//!
//! ```text
//! σn = Σ w (d̂ − d(X))² / Σ w d̂²
//! ```
//!
//! over pairs `i < j`, where `d̂` are the disparities (the optimally
//! transformed proximities). Disparities are rescaled every iteration so that
//! `Σ w d̂² = n(n−1)/2`. Kruskal's stress-1 for the same solution is `√σn`;
//! ALSCAL's S-stress, which works on squared distances, is a different
//! objective and is not comparable.
//!
//! Similarity input is turned into dissimilarities with
//! `max(S) − S` before fitting. Diagonal and missing (`NaN`) proximities get
//! weight zero; every other pair has weight one.

mod classical;
mod isotonic;
mod procrustes;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use classical::classical_init;
pub use isotonic::{monotone_regression, pava};
pub use procrustes::{procrustes_align, Alignment};

use crate::linalg::{center_columns, EigenError};
use crate::matrix::{MatrixError, MeasurementLevel, ProximityKind, ProximityMatrix};
use crate::proximity::{to_dissimilarity, DissimilarityConstant, ProximityError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{k} dimensions requested for {n} points; need dimensions < points")]
    DimensionTooLarge { k: usize, n: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("configuration has zero variance")]
    DegenerateConfiguration,
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Starting configuration for SMACOF.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Torgerson classical scaling of the dissimilarities.
    Classical,
    /// Uniform in `[-1, 1]` per coordinate from a seeded ChaCha8 stream.
    Random { seed: u64 },
    /// A caller-supplied `n × k` configuration.
    Custom(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsConfig {
    pub dimensions: usize,
    /// Overrides the level recorded on the input matrix.
    pub level: Option<MeasurementLevel>,
    /// Overrides the kind recorded on the input matrix.
    pub kind_override: Option<ProximityKind>,
    pub init: Init,
    pub max_iterations: usize,
    /// Iteration stops once stress improves by less than this.
    pub epsilon: f64,
}

impl Default for MdsConfig {
    fn default() -> Self {
        Self {
            dimensions: 2,
            level: None,
            kind_override: None,
            init: Init::Classical,
            max_iterations: 1000,
            epsilon: 1e-6,
        }
    }
}

impl MdsConfig {
    pub fn with_dimensions(dimensions: usize) -> Self {
        Self { dimensions, ..Self::default() }
    }

    pub fn level(mut self, level: MeasurementLevel) -> Self {
        self.level = Some(level);
        self
    }

    pub fn kind(mut self, kind: ProximityKind) -> Self {
        self.kind_override = Some(kind);
        self
    }

    pub fn init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self, n: usize) -> Result<(), MdsError> {
        if self.dimensions == 0 {
            return Err(MdsError::InvalidConfig("dimensions must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(MdsError::InvalidConfig("epsilon must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(MdsError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.dimensions >= n {
            return Err(MdsError::DimensionTooLarge { k: self.dimensions, n });
        }
        Ok(())
    }
}

/// Optimally transformed proximities on the dissimilarity scale; symmetric
/// with zero diagonal. Missing pairs hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Disparities(pub DMatrix<f64>);

/// A fitted MDS solution.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub labels: Vec<String>,
    /// `n × k`, column means zero.
    pub coords: DMatrix<f64>,
    /// Final normalized raw stress.
    pub stress: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Stress after initialization followed by one value per iteration.
    pub stress_history: Vec<f64>,
    pub disparities: Disparities,
    pub level: MeasurementLevel,
}

impl Configuration {
    /// Kruskal's stress-1, `√σn`.
    pub fn kruskal_stress(&self) -> f64 {
        self.stress.sqrt()
    }

    pub fn distances(&self) -> DMatrix<f64> {
        pairwise_distances(&self.coords)
    }
}

pub(crate) fn pairwise_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (x.row(i) - x.row(j)).norm();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Dissimilarities the fit will use, after resolving the kind.
fn resolve_dissimilarities(p: &ProximityMatrix, kind: ProximityKind) -> Result<DMatrix<f64>, MdsError> {
    match kind {
        ProximityKind::Similarity => {
            let as_similarity = if p.kind() == ProximityKind::Similarity {
                p.clone()
            } else {
                ProximityMatrix::new(p.labels().to_vec(), p.values().clone(), ProximityKind::Similarity, p.level())?
            };
            Ok(to_dissimilarity(&as_similarity, DissimilarityConstant::Auto)?.values().clone())
        }
        ProximityKind::Dissimilarity => {
            let mut v = p.values().clone();
            v.fill_diagonal(0.0);
            if let Some(bad) = v.iter().find(|x| **x < 0.0) {
                return Err(MdsError::DegenerateInput(format!("negative dissimilarity {bad}")));
            }
            Ok(v)
        }
    }
}

/// Upper-triangle pair list with unit weights for observed entries.
struct Pairs {
    n: usize,
    index: Vec<(usize, usize)>,
    delta: Vec<f64>,
    weight: Vec<f64>,
    complete: bool,
}

impl Pairs {
    fn new(d: &DMatrix<f64>) -> Self {
        let n = d.nrows();
        let mut index = Vec::with_capacity(n * (n - 1) / 2);
        let mut delta = Vec::with_capacity(index.capacity());
        let mut weight = Vec::with_capacity(index.capacity());
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d[(i, j)];
                index.push((i, j));
                if v.is_nan() {
                    delta.push(0.0);
                    weight.push(0.0);
                } else {
                    delta.push(v);
                    weight.push(1.0);
                }
            }
        }
        let complete = weight.iter().all(|&w| w > 0.0);
        Self { n, index, delta, weight, complete }
    }

    fn distances(&self, x: &DMatrix<f64>) -> Vec<f64> {
        self.index.iter().map(|&(i, j)| (x.row(i) - x.row(j)).norm()).collect()
    }

    fn target_norm(&self) -> f64 {
        (self.n * (self.n - 1)) as f64 / 2.0
    }

    fn weighted_ss(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.weight).map(|(x, w)| w * x * x).sum()
    }

    fn stress(&self, dhat: &[f64], d: &[f64]) -> f64 {
        let num: f64 = dhat.iter().zip(d).zip(&self.weight).map(|((a, b), w)| w * (a - b) * (a - b)).sum();
        num / self.weighted_ss(dhat)
    }
}

/// Weighted least-squares fit `d ≈ a + b·δ` constrained to `b ≥ 0` and
/// `a + b·δ ≥ 0` for every observed δ. The feasible set is a convex cone, so
/// the optimum is either the unconstrained fit or lies on one of its two
/// boundary rays.
fn interval_fit(delta: &[f64], d: &[f64], w: &[f64]) -> Vec<f64> {
    let wsum: f64 = w.iter().sum();
    let mean = |v: &[f64]| v.iter().zip(w).map(|(x, w)| w * x).sum::<f64>() / wsum;
    let (md, mdist) = (mean(delta), mean(d));
    let sxx: f64 = delta.iter().zip(w).map(|(x, w)| w * (x - md) * (x - md)).sum();
    let sxy: f64 = delta.iter().zip(d).zip(w).map(|((x, y), w)| w * (x - md) * (y - mdist)).sum();
    let delta_min = delta.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(x, _)| *x).fold(f64::INFINITY, f64::min);

    let sse = |fit: &[f64]| -> f64 { fit.iter().zip(d).zip(w).map(|((f, y), w)| w * (f - y) * (f - y)).sum() };

    if sxx > 0.0 {
        let b = sxy / sxx;
        let a = mdist - b * md;
        if b >= 0.0 && a + b * delta_min >= 0.0 {
            return delta.iter().map(|x| a + b * x).collect();
        }
    }
    let constant: Vec<f64> = vec![mdist.max(0.0); delta.len()];
    let shifted: Vec<f64> = delta.iter().map(|x| x - delta_min).collect();
    let sxx0: f64 = shifted.iter().zip(w).map(|(x, w)| w * x * x).sum();
    if sxx0 <= 0.0 {
        return constant;
    }
    let b0 = (shifted.iter().zip(d).zip(w).map(|((x, y), w)| w * x * y).sum::<f64>() / sxx0).max(0.0);
    let anchored: Vec<f64> = shifted.iter().map(|x| b0 * x).collect();
    if sse(&anchored) < sse(&constant) {
        anchored
    } else {
        constant
    }
}

/// Disparities for the current distances, rescaled to the target norm.
fn update_disparities(level: MeasurementLevel, pairs: &Pairs, d: &[f64]) -> Vec<f64> {
    let mut dhat = match level {
        MeasurementLevel::Ratio => pairs.delta.clone(),
        MeasurementLevel::Interval => interval_fit(&pairs.delta, d, &pairs.weight),
        MeasurementLevel::Ordinal => monotone_regression(d, &pairs.delta, &pairs.weight),
    };
    let mut ss = pairs.weighted_ss(&dhat);
    if !(ss > 0.0) {
        // the distances carry no information yet; fall back to the proximities
        dhat = pairs.delta.clone();
        ss = pairs.weighted_ss(&dhat);
    }
    let factor = (pairs.target_norm() / ss).sqrt();
    for (v, w) in dhat.iter_mut().zip(&pairs.weight) {
        *v = if *w > 0.0 { *v * factor } else { 0.0 };
    }
    dhat
}

/// Moore-Penrose inverse of the weighted Laplacian `V`, needed only when some
/// weights are zero: `V⁺ = (V + 11ᵀ)⁻¹ − n⁻² 11ᵀ`.
fn laplacian_pinv(pairs: &Pairs) -> Result<DMatrix<f64>, MdsError> {
    let n = pairs.n;
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (&(i, j), &w) in pairs.index.iter().zip(&pairs.weight) {
        v[(i, j)] -= w;
        v[(j, i)] -= w;
        v[(i, i)] += w;
        v[(j, j)] += w;
    }
    let shifted = v.add_scalar(1.0);
    let inv = shifted
        .try_inverse()
        .ok_or_else(|| MdsError::DegenerateInput("missing proximities disconnect the points".into()))?;
    Ok(inv.add_scalar(-1.0 / (n * n) as f64))
}

fn guttman_transform(x: &DMatrix<f64>, pairs: &Pairs, dhat: &[f64], d: &[f64], pinv: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let n = pairs.n;
    let mut b = DMatrix::<f64>::zeros(n, n);
    for (k, &(i, j)) in pairs.index.iter().enumerate() {
        if d[k] > 0.0 && pairs.weight[k] > 0.0 {
            let v = pairs.weight[k] * dhat[k] / d[k];
            b[(i, j)] -= v;
            b[(j, i)] -= v;
            b[(i, i)] += v;
            b[(j, j)] += v;
        }
    }
    let bx = b * x;
    match pinv {
        Some(p) => p * bx,
        None => bx / n as f64,
    }
}

fn initial_configuration(init: &Init, delta: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>, MdsError> {
    let n = delta.nrows();
    let mut x = match init {
        Init::Classical => classical_init(delta, k)?,
        Init::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..=1.0))
        }
        Init::Custom(x) => {
            if x.shape() != (n, k) {
                return Err(MdsError::ShapeMismatch {
                    left: format!("{n} x {k}"),
                    right: format!("{} x {}", x.nrows(), x.ncols()),
                });
            }
            x.clone()
        }
    };
    center_columns(&mut x);
    Ok(x)
}

/// Fits an MDS configuration to a proximity matrix.
///
/// The recorded stress sequence is non-increasing: the Guttman transform
/// decreases stress for fixed disparities, and each disparity update is a
/// normalized projection onto the cone of admissible transformations.
pub fn mds(p: &ProximityMatrix, cfg: &MdsConfig) -> Result<Configuration, MdsError> {
    let n = p.len();
    cfg.validate(n)?;
    let level = cfg.level.unwrap_or(p.level());
    let kind = cfg.kind_override.unwrap_or(p.kind());
    let delta = resolve_dissimilarities(p, kind)?;

    let pairs = Pairs::new(&delta);
    if !pairs.delta.iter().zip(&pairs.weight).any(|(d, w)| *w > 0.0 && *d > 0.0) {
        return Err(MdsError::DegenerateInput("all off-diagonal dissimilarities are zero or missing".into()));
    }
    let pinv = if pairs.complete { None } else { Some(laplacian_pinv(&pairs)?) };

    let mut x = initial_configuration(&cfg.init, &delta, cfg.dimensions)?;
    let mut d = pairs.distances(&x);
    if d.iter().all(|&v| v == 0.0) {
        return Err(MdsError::DegenerateConfiguration);
    }
    let mut dhat = update_disparities(level, &pairs, &d);
    let mut stress = pairs.stress(&dhat, &d);
    let mut history = vec![stress];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        x = guttman_transform(&x, &pairs, &dhat, &d, pinv.as_ref());
        d = pairs.distances(&x);
        dhat = update_disparities(level, &pairs, &d);
        let next = pairs.stress(&dhat, &d);
        iterations += 1;
        history.push(next);
        let improvement = stress - next;
        stress = next;
        if improvement < cfg.epsilon {
            converged = true;
            break;
        }
    }
    center_columns(&mut x);

    let mut disparities = DMatrix::<f64>::zeros(n, n);
    for (k, &(i, j)) in pairs.index.iter().enumerate() {
        disparities[(i, j)] = dhat[k];
        disparities[(j, i)] = dhat[k];
    }
    Ok(Configuration {
        labels: p.labels().to_vec(),
        coords: x,
        stress,
        iterations_used: iterations,
        converged,
        stress_history: history,
        disparities: Disparities(disparities),
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dissim(values: DMatrix<f64>) -> ProximityMatrix {
        let labels = (0..values.nrows()).map(|i| format!("p{i}")).collect();
        ProximityMatrix::new(labels, values, ProximityKind::Dissimilarity, MeasurementLevel::Ratio).unwrap()
    }

    fn from_points(points: &DMatrix<f64>) -> ProximityMatrix {
        dissim(pairwise_distances(points))
    }

    #[test]
    fn equilateral_triangle() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        let c = mds(&dissim(d), &MdsConfig::default()).unwrap();
        assert!(c.stress < 1e-6);
        let dist = c.distances();
        let side = dist[(0, 1)];
        assert!((dist[(0, 2)] - side).abs() < 1e-6 && (dist[(1, 2)] - side).abs() < 1e-6);
    }

    #[test]
    fn unit_square() {
        let pts = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let c = mds(&from_points(&pts), &MdsConfig::default()).unwrap();
        assert!(c.stress < 1e-6);
        let a = procrustes_align(&pts, &c.coords).unwrap();
        assert!(a.congruence > 1.0 - 1e-6);
        for col in 0..2 {
            assert!(c.coords.column(col).sum().abs() < 1e-9);
        }
    }

    #[test]
    fn config_errors() {
        let pts = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let p = from_points(&pts);
        assert_eq!(mds(&p, &MdsConfig::with_dimensions(3)).unwrap_err(), MdsError::DimensionTooLarge { k: 3, n: 3 });
        let zero = dissim(DMatrix::zeros(3, 3));
        assert!(matches!(mds(&zero, &MdsConfig::default()), Err(MdsError::DegenerateInput(_))));
        let bad_eps = MdsConfig { epsilon: 0.0, ..MdsConfig::with_dimensions(1) };
        assert!(matches!(mds(&p, &bad_eps), Err(MdsError::InvalidConfig(_))));
    }

    #[test]
    fn missing_values_get_zero_weight() {
        let pts = DMatrix::from_row_slice(5, 2, &[0.0, 0.0, 2.0, 0.0, 2.0, 1.0, 0.0, 1.5, 1.0, 3.0]);
        let mut d = pairwise_distances(&pts);
        d[(0, 2)] = f64::NAN;
        d[(2, 0)] = f64::NAN;
        let cfg = MdsConfig { epsilon: 1e-12, max_iterations: 20_000, ..MdsConfig::default() };
        let c = mds(&dissim(d), &cfg).unwrap();
        assert!(c.stress < 1e-6, "stress {}", c.stress);
        assert_eq!(c.disparities.0[(0, 2)], 0.0);
    }

    #[test]
    fn interval_fit_respects_constraints() {
        // decreasing relation: best admissible fit is flat or anchored at δmin
        let delta = [1.0, 2.0, 3.0, 4.0];
        let d = [4.0, 3.0, 2.0, 1.0];
        let fit = interval_fit(&delta, &d, &[1.0; 4]);
        assert!(fit.iter().all(|v| (*v - 2.5).abs() < 1e-12));
        let up = interval_fit(&delta, &[3.0, 5.0, 7.0, 9.0], &[1.0; 4]);
        assert_eq!(up, vec![3.0, 5.0, 7.0, 9.0]);
        // steep line with negative intercept is pulled onto the δmin anchor
        let steep = interval_fit(&[1.0, 2.0, 3.0], &[0.0, 0.0, 6.0], &[1.0; 3]);
        assert!(steep.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn random_init_is_deterministic() {
        let pts = DMatrix::from_row_slice(5, 2, &[0.0, 0.0, 2.0, 0.0, 2.0, 1.0, 0.0, 1.5, 1.0, 3.0]);
        let cfg = MdsConfig::default().init(Init::Random { seed: 7 });
        let a = mds(&from_points(&pts), &cfg).unwrap();
        let b = mds(&from_points(&pts), &cfg).unwrap();
        assert_eq!(a.coords, b.coords);
        assert_eq!(a.stress_history, b.stress_history);
    }
}
