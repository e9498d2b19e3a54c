//! Example datasets compiled into the library.

use super::{parse_cooccurrence_csv, parse_proximity_csv, parse_records, IngestError};
use crate::matrix::{
    CooccurrenceMatrix, DiagonalPolicy, MeasurementLevel, OccurrenceMatrix, ProximityKind, ProximityMatrix,
};

const CITIES: &str = include_str!("../../data/cities.csv");
const FIGURE1: &str = include_str!("../../data/figure1.csv");
const FIGURE2: &str = include_str!("../../data/figure2.tsv");

pub const BUILTIN_NAMES: [&str; 3] = ["cities", "figure1", "figure2"];

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinDataset {
    /// Flying mileages between ten US cities (ratio dissimilarities).
    Cities(ProximityMatrix),
    /// Co-citation counts among four papers, diagonal left empty.
    Figure1(CooccurrenceMatrix),
    /// Five citing papers × four cited papers, binary.
    Figure2(OccurrenceMatrix),
}

pub fn cities() -> ProximityMatrix {
    parse_proximity_csv(CITIES, ProximityKind::Dissimilarity, MeasurementLevel::Ratio).expect("bundled cities data")
}

pub fn figure1() -> CooccurrenceMatrix {
    parse_cooccurrence_csv(FIGURE1, DiagonalPolicy::Zeroed).expect("bundled figure1 data")
}

pub fn figure2() -> OccurrenceMatrix {
    parse_records(FIGURE2).expect("bundled figure2 data")
}

/// The bundled text a dataset is parsed from.
pub fn builtin_source(name: &str) -> Result<&'static str, IngestError> {
    match name {
        "cities" => Ok(CITIES),
        "figure1" => Ok(FIGURE1),
        "figure2" => Ok(FIGURE2),
        other => Err(IngestError::UnknownDataset(other.to_string())),
    }
}

pub fn builtin_dataset(name: &str) -> Result<BuiltinDataset, IngestError> {
    match name {
        "cities" => Ok(BuiltinDataset::Cities(cities())),
        "figure1" => Ok(BuiltinDataset::Figure1(figure1())),
        "figure2" => Ok(BuiltinDataset::Figure2(figure2())),
        other => Err(IngestError::UnknownDataset(other.to_string())),
    }
}
