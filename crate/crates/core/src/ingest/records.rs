//! Citing-document records.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::IngestError;
use crate::matrix::OccurrenceMatrix;

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedLine { line, reason: reason.into() }
}

/// Splits `label[:count]` on the last colon.
fn parse_item(item: &str, line: usize) -> Result<(String, u64), IngestError> {
    let item = item.trim();
    let (label, count) = match item.rsplit_once(':') {
        Some((label, count)) => {
            let label = label.trim();
            let count = count.trim();
            if let Some(digits) = count.strip_prefix('-') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(IngestError::NegativeCount { line, label: label.to_string() });
                }
            }
            if count.is_empty() || !count.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(line, format!("bad count {count:?} for {label:?}")));
            }
            let n: u64 = count.parse().map_err(|_| IngestError::CountOverflow { line })?;
            if n == 0 {
                return Err(malformed(line, format!("zero count for {label:?}")));
            }
            (label, n)
        }
        None => (item, 1),
    };
    if label.is_empty() {
        return Err(malformed(line, "empty attribute label"));
    }
    Ok((label.to_string(), count))
}

/// Parses records into an occurrence matrix. Rows keep file order, columns
/// are the distinct labels in sorted order, repeated labels accumulate.
/// A document line with nothing after the tab is a document without
/// attributes.
pub fn parse_records(text: &str) -> Result<OccurrenceMatrix, IngestError> {
    let mut docs: Vec<String> = Vec::new();
    let mut rows: Vec<BTreeMap<String, u64>> = Vec::new();
    let mut seen = HashSet::new();
    let mut labels = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let (doc, rest) = raw.split_once('\t').ok_or_else(|| malformed(line, "missing tab after document id"))?;
        let doc = doc.trim();
        if doc.is_empty() {
            return Err(malformed(line, "empty document id"));
        }
        if !seen.insert(doc.to_string()) {
            return Err(IngestError::DuplicateDocId { line, doc_id: doc.to_string() });
        }
        let mut row = BTreeMap::new();
        if !rest.trim().is_empty() {
            for item in rest.split(';') {
                let (label, count) = parse_item(item, line)?;
                let cell = row.entry(label.clone()).or_insert(0u64);
                *cell = cell.checked_add(count).ok_or(IngestError::CountOverflow { line })?;
                labels.insert(label);
            }
        }
        docs.push(doc.to_string());
        rows.push(row);
    }

    let cols: Vec<String> = labels.into_iter().collect();
    let mut counts = DMatrix::zeros(docs.len(), cols.len());
    for (r, row) in rows.iter().enumerate() {
        for (label, &count) in row {
            let c = cols.binary_search(label).expect("label collected above");
            counts[(r, c)] = count;
        }
    }
    Ok(OccurrenceMatrix::new(docs, cols, counts)?)
}

fn encodable(label: &str, forbidden: &[char]) -> bool {
    !label.is_empty() && label.trim() == label && !label.contains(forbidden) && !label.starts_with('#')
}

/// Writes one line per document listing its non-zero attributes in column
/// order; counts of 1 are left implicit. Attributes that no document
/// carries cannot be represented and are dropped.
pub fn serialize_records(a: &OccurrenceMatrix) -> Result<String, IngestError> {
    for doc in a.row_labels() {
        if !encodable(doc, &['\t', '\n', '\r']) {
            return Err(IngestError::UnencodableLabel(doc.clone()));
        }
    }
    for label in a.col_labels() {
        if !encodable(label, &['\t', '\n', '\r', ';', ':']) {
            return Err(IngestError::UnencodableLabel(label.clone()));
        }
    }
    let mut out = String::new();
    for (r, doc) in a.row_labels().iter().enumerate() {
        out.push_str(doc);
        out.push('\t');
        let mut first = true;
        for (c, label) in a.col_labels().iter().enumerate() {
            let n = a.get(r, c);
            if n == 0 {
                continue;
            }
            if !first {
                out.push(';');
            }
            first = false;
            out.push_str(label);
            if n != 1 {
                let _ = write!(out, ":{n}");
            }
        }
        out.push('\n');
    }
    Ok(out)
}
