//! Mapping citation data: occurrence and co-occurrence matrices, proximity
//! measures, SMACOF multidimensional scaling, principal-component factor
//! analysis with varimax rotation, and spring-embedder network layout.
//!
//! ```
//! use cocite::ingest::cities;
//! use cocite::mds::{mds, MdsConfig};
//!
//! let map = mds(&cities(), &MdsConfig::default()).unwrap();
//! assert!(map.stress < 0.005);
//! ```

pub mod factor;
pub mod ingest;
pub mod layout;
pub mod linalg;
pub mod matrix;
pub mod mds;
pub mod proximity;

use thiserror::Error;

pub use matrix::{
    affiliations, binarize, cooccurrence, CooccurrenceMatrix, DiagonalPolicy, MeasurementLevel, OccurrenceMatrix,
    ProximityKind, ProximityMatrix,
};

/// Any error from the library, prefixed with the module that raised it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix: {0}")]
    Matrix(#[from] matrix::MatrixError),
    #[error("proximity: {0}")]
    Proximity(#[from] proximity::ProximityError),
    #[error("mds: {0}")]
    Mds(#[from] mds::MdsError),
    #[error("factor: {0}")]
    Factor(#[from] factor::FactorError),
    #[error("layout: {0}")]
    Layout(#[from] layout::LayoutError),
    #[error("ingest: {0}")]
    Ingest(#[from] ingest::IngestError),
    #[error("linalg: {0}")]
    Eigen(#[from] linalg::EigenError),
}
