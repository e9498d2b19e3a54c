//! Text input formats and the bundled example datasets.
//!
//! * records: one citing document per line, `doc_id<TAB>label[:count](;label[:count])*`
//! * square CSV: labeled symmetric matrix, either triangle may be left blank or `.`
//! * rectangular CSV: labeled documents × attributes count table
//!
//! Labels are trimmed and case-sensitive. Input may use `\n` or `\r\n`;
//! output always uses `\n`.

mod builtin;
mod tables;
mod records;

use thiserror::Error;

use crate::matrix::MatrixError;

pub use self::builtin::{builtin_dataset, builtin_source, cities, figure1, figure2, BuiltinDataset, BUILTIN_NAMES};
pub use self::tables::{
    parse_cooccurrence_csv, parse_occurrence_csv, parse_proximity_csv, serialize_cooccurrence_csv,
    serialize_occurrence_csv, serialize_proximity_csv, ASYMMETRY_TOLERANCE,
};
pub use self::records::{parse_records, serialize_records};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: duplicate document id {doc_id:?}")]
    DuplicateDocId { line: usize, doc_id: String },
    #[error("line {line}: negative count for {label:?}")]
    NegativeCount { line: usize, label: String },
    #[error("line {line}: count overflows a 64-bit integer")]
    CountOverflow { line: usize },
    #[error("cells ({i}, {j}) and ({j}, {i}) differ by {delta}")]
    AsymmetricInput { i: usize, j: usize, delta: f64 },
    #[error("row label {row:?} at position {position} does not match column label {column:?}")]
    LabelMismatch { position: usize, row: String, column: String },
    #[error("cells ({i}, {j}) and ({j}, {i}) are both empty")]
    MissingValue { i: usize, j: usize },
    #[error("label {0:?} cannot be written in this format")]
    UnencodableLabel(String),
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
