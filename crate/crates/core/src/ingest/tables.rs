//! Labeled matrices as comma-separated text.
//!
//! The first row holds the column labels after an ignored corner cell; each
//! following row starts with its label. In square matrices the row labels
//! must repeat the column labels in order.

use nalgebra::DMatrix;

use super::IngestError;
use crate::matrix::{
    CooccurrenceMatrix, DiagonalPolicy, MeasurementLevel, OccurrenceMatrix, ProximityKind, ProximityMatrix,
};

/// Largest difference tolerated between a cell and its mirror image.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-9;

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedLine { line, reason: reason.into() }
}

struct Table {
    cols: Vec<String>,
    rows: Vec<String>,
    /// Raw cell text, `None` for blank or `.`.
    cells: Vec<Vec<Option<String>>>,
    /// Source line of each data row.
    lines: Vec<usize>,
}

fn read_table(text: &str) -> Result<Table, IngestError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec));
    }
    let Some((header_line, header)) = records.first() else {
        return Err(malformed(1, "empty input"));
    };
    let cols: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if cols.is_empty() {
        return Err(malformed(*header_line, "header has no column labels"));
    }
    if let Some(p) = cols.iter().position(String::is_empty) {
        return Err(malformed(*header_line, format!("column label {} is empty", p + 1)));
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    let mut lines = Vec::new();
    for (line, rec) in &records[1..] {
        if rec.len() != cols.len() + 1 {
            return Err(malformed(*line, format!("expected {} fields, found {}", cols.len() + 1, rec.len())));
        }
        let label = &rec[0];
        if label.is_empty() {
            return Err(malformed(*line, "empty row label"));
        }
        rows.push(label.to_string());
        cells.push(
            rec.iter()
                .skip(1)
                .map(|c| if c.is_empty() || c == "." { None } else { Some(c.to_string()) })
                .collect(),
        );
        lines.push(*line);
    }
    Ok(Table { cols, rows, cells, lines })
}

fn check_square(t: &Table) -> Result<(), IngestError> {
    let n = t.cols.len();
    if t.rows.len() != n {
        let line = t.lines.last().copied().unwrap_or(1);
        return Err(malformed(line, format!("{} rows for {n} columns", t.rows.len())));
    }
    for (position, (row, column)) in t.rows.iter().zip(&t.cols).enumerate() {
        if row != column {
            return Err(IngestError::LabelMismatch { position, row: row.clone(), column: column.clone() });
        }
    }
    Ok(())
}

/// Fills blank cells from their mirror image and checks agreement where
/// both are present. Blank diagonal cells read as 0; pairs blank on both
/// sides stay `None`.
fn symmetrize<T: Copy>(
    t: &Table,
    parse: impl Fn(&str, usize) -> Result<T, IngestError>,
    delta: impl Fn(T, T) -> f64,
    zero: T,
) -> Result<Vec<Vec<Option<T>>>, IngestError> {
    let n = t.cols.len();
    let mut v = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(s) = &t.cells[i][j] {
                v[i][j] = Some(parse(s, t.lines[i])?);
            }
        }
    }
    for i in 0..n {
        if v[i][i].is_none() {
            v[i][i] = Some(zero);
        }
        for j in 0..i {
            match (v[i][j], v[j][i]) {
                (Some(a), Some(b)) => {
                    let d = delta(a, b);
                    if !(d <= ASYMMETRY_TOLERANCE) {
                        return Err(IngestError::AsymmetricInput { i, j, delta: d });
                    }
                    v[j][i] = Some(a);
                }
                (Some(a), None) => v[j][i] = Some(a),
                (None, Some(b)) => v[i][j] = Some(b),
                (None, None) => {}
            }
        }
    }
    Ok(v)
}

fn parse_f64(s: &str, line: usize) -> Result<f64, IngestError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| malformed(line, format!("not a finite number: {s:?}")))
}

fn parse_count(s: &str, line: usize) -> Result<u64, IngestError> {
    if s.starts_with('-') {
        return Err(IngestError::NegativeCount { line, label: s.to_string() });
    }
    s.parse::<u64>().map_err(|_| malformed(line, format!("not a non-negative integer: {s:?}")))
}

/// Reads a symmetric real matrix. Pairs left blank in both triangles become
/// missing values (`NaN`).
pub fn parse_proximity_csv(
    text: &str,
    kind: ProximityKind,
    level: MeasurementLevel,
) -> Result<ProximityMatrix, IngestError> {
    let t = read_table(text)?;
    check_square(&t)?;
    let v = symmetrize(&t, parse_f64, |a, b| (a - b).abs(), 0.0)?;
    let n = t.cols.len();
    let values = DMatrix::from_fn(n, n, |i, j| v[i][j].unwrap_or(f64::NAN));
    Ok(ProximityMatrix::new(t.cols, values, kind, level)?)
}

/// Reads a symmetric count matrix. Every off-diagonal pair must be given in
/// at least one triangle.
pub fn parse_cooccurrence_csv(text: &str, policy: DiagonalPolicy) -> Result<CooccurrenceMatrix, IngestError> {
    let t = read_table(text)?;
    check_square(&t)?;
    let v = symmetrize(&t, parse_count, |a: u64, b: u64| a.abs_diff(b) as f64, 0)?;
    let n = t.cols.len();
    let mut counts = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            counts[(i, j)] = v[i][j].ok_or(IngestError::MissingValue { i: i.max(j), j: i.min(j) })?;
        }
    }
    Ok(CooccurrenceMatrix::new(t.cols, counts, policy)?)
}

/// Reads a documents × attributes count table.
pub fn parse_occurrence_csv(text: &str) -> Result<OccurrenceMatrix, IngestError> {
    let t = read_table(text)?;
    let mut counts = DMatrix::zeros(t.rows.len(), t.cols.len());
    for (r, row) in t.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let s = cell.as_deref().ok_or_else(|| malformed(t.lines[r], format!("blank cell in column {}", c + 1)))?;
            counts[(r, c)] = parse_count(s, t.lines[r])?;
        }
    }
    Ok(OccurrenceMatrix::new(t.rows, t.cols, counts)?)
}

fn write_table(cols: &[String], rows: &[String], cell: impl Fn(usize, usize) -> String) -> Result<String, IngestError> {
    for label in cols.iter().chain(rows) {
        if label.is_empty() || label.trim() != label || label == "." {
            return Err(IngestError::UnencodableLabel(label.clone()));
        }
    }
    let mut w = ::csv::WriterBuilder::new().terminator(::csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: ::csv::Error| IngestError::UnencodableLabel(e.to_string());
    w.write_record(std::iter::once("").chain(cols.iter().map(String::as_str))).map_err(io)?;
    for (r, label) in rows.iter().enumerate() {
        let fields: Vec<String> = std::iter::once(label.clone()).chain((0..cols.len()).map(|c| cell(r, c))).collect();
        w.write_record(&fields).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| IngestError::UnencodableLabel(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output of UTF-8 input"))
}

/// Writes the full matrix; missing values become blank cells. Numbers use
/// the shortest representation that reads back to the same `f64`.
pub fn serialize_proximity_csv(p: &ProximityMatrix) -> Result<String, IngestError> {
    write_table(p.labels(), p.labels(), |i, j| {
        let x = p.get(i, j);
        if x.is_nan() {
            String::new()
        } else {
            x.to_string()
        }
    })
}

pub fn serialize_cooccurrence_csv(m: &CooccurrenceMatrix) -> Result<String, IngestError> {
    write_table(m.labels(), m.labels(), |i, j| m.get(i, j).to_string())
}

pub fn serialize_occurrence_csv(a: &OccurrenceMatrix) -> Result<String, IngestError> {
    write_table(a.col_labels(), a.row_labels(), |r, c| a.get(r, c).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOWER: &str = ",a,b,c\na,0,.,.\nb,5,0,.\nc,3,4,0\n";

    #[test]
    fn lower_triangle_is_mirrored() {
        let p = parse_proximity_csv(LOWER, ProximityKind::Dissimilarity, MeasurementLevel::Ratio).unwrap();
        assert_eq!(p.get(0, 1), 5.0);
        assert_eq!(p.get(1, 0), 5.0);
        assert_eq!(p.get(1, 2), 4.0);
        let upper = ",a,b,c\na,,5,3\r\nb,,,4\r\nc,,,\r\n";
        let q = parse_proximity_csv(upper, ProximityKind::Dissimilarity, MeasurementLevel::Ratio).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn asymmetric_and_mismatched() {
        let bad = ",a,b\na,0,5\nb,7,0\n";
        assert_eq!(
            parse_proximity_csv(bad, ProximityKind::Dissimilarity, MeasurementLevel::Ratio),
            Err(IngestError::AsymmetricInput { i: 1, j: 0, delta: 2.0 })
        );
        assert!(matches!(parse_cooccurrence_csv(bad, DiagonalPolicy::Raw), Err(IngestError::AsymmetricInput { .. })));
        let labels = ",a,b\na,0,1\nc,1,0\n";
        assert!(matches!(
            parse_cooccurrence_csv(labels, DiagonalPolicy::Raw),
            Err(IngestError::LabelMismatch { position: 1, .. })
        ));
        assert!(matches!(
            parse_cooccurrence_csv(",a,b\na,0,\nb,,0\n", DiagonalPolicy::Raw),
            Err(IngestError::MissingValue { i: 1, j: 0 })
        ));
        assert!(matches!(
            parse_cooccurrence_csv(",a,b\na,0,1\nb,1\n", DiagonalPolicy::Raw),
            Err(IngestError::MalformedLine { line: 3, .. })
        ));
        assert!(matches!(
            parse_proximity_csv(",a,b\na,0,x\nb,1,0\n", ProximityKind::Similarity, MeasurementLevel::Ratio),
            Err(IngestError::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn missing_pairs_in_proximities() {
        let p = parse_proximity_csv(",a,b,c\na,0,,1\nb,,0,1\nc,1,1,0\n", ProximityKind::Dissimilarity, MeasurementLevel::Ordinal)
            .unwrap();
        assert!(p.get(0, 1).is_nan());
        let text = serialize_proximity_csv(&p).unwrap();
        assert_eq!(text, ",a,b,c\na,0,,1\nb,,0,1\nc,1,1,0\n");
    }

    #[test]
    fn quoted_labels_round_trip() {
        let m = CooccurrenceMatrix::new(
            vec!["Smith, J".into(), "Lee \"K\"".into()],
            DMatrix::from_row_slice(2, 2, &[3, 1, 1, 2]),
            DiagonalPolicy::Raw,
        )
        .unwrap();
        let text = serialize_cooccurrence_csv(&m).unwrap();
        assert!(text.starts_with(",\"Smith, J\",\"Lee \"\"K\"\"\"\n"));
        assert_eq!(parse_cooccurrence_csv(&text, DiagonalPolicy::Raw).unwrap(), m);
    }

    #[test]
    fn occurrence_round_trip() {
        let text = ",A,B,C\nd1,1,0,2\nd2,0,1,1\n";
        let a = parse_occurrence_csv(text).unwrap();
        assert_eq!(a.get(0, 2), 2);
        assert_eq!(serialize_occurrence_csv(&a).unwrap(), text);
        assert!(matches!(parse_occurrence_csv(",A,B\nd1,1,-1\n"), Err(IngestError::NegativeCount { line: 2, .. })));
        assert!(matches!(parse_occurrence_csv(",A,B\nd1,1,\n"), Err(IngestError::MalformedLine { line: 2, .. })));
    }

    #[test]
    fn float_formatting_is_exact() {
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.1 + 0.2, 0.1 + 0.2, 1.0]);
        let p = ProximityMatrix::new(vec!["x".into(), "y".into()], v, ProximityKind::Similarity, MeasurementLevel::Ratio)
            .unwrap();
        let back = parse_proximity_csv(&serialize_proximity_csv(&p).unwrap(), ProximityKind::Similarity, MeasurementLevel::Ratio)
            .unwrap();
        assert_eq!(back, p);
    }
}
