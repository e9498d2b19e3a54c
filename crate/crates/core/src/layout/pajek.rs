//! Pajek `.net` reader and writer.
//!
//! ```text
//! *Vertices 3
//! 1 "Paper 1" 0.0000 0.5000
//! 2 "Paper 2" 1.0000 0.5000
//! 3 "Paper 3"
//! *Edges
//! 1 2 10
//! ```
//!
//! Vertex ids are 1-based, labels double-quoted, fields space-separated and
//! lines end in `\n`. Coordinates, when written, are rescaled into `[0, 1]`
//! with a common factor for both axes. Double quotes inside labels have no
//! escape in the format and are written as single quotes.

use std::fmt::Write as _;

use super::{Edge, LayoutError, WeightedGraph};

/// Serializes a graph, with vertex coordinates when `positions` is given.
pub fn export_pajek(g: &WeightedGraph, positions: Option<&[[f64; 2]]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", g.node_count());
    let normalized = positions.map(normalize_unit);
    for (i, label) in g.node_labels().iter().enumerate() {
        let label = label.replace('"', "'");
        match &normalized {
            Some(p) => {
                let _ = writeln!(out, "{} \"{}\" {:.4} {:.4}", i + 1, label, p[i][0], p[i][1]);
            }
            None => {
                let _ = writeln!(out, "{} \"{}\"", i + 1, label);
            }
        }
    }
    out.push_str("*Edges\n");
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.i + 1, e.j + 1, e.weight);
    }
    out
}

fn normalize_unit(p: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for q in p {
        for a in 0..2 {
            lo[a] = lo[a].min(q[a]);
            hi[a] = hi[a].max(q[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    p.iter()
        .map(|q| {
            if span > 0.0 {
                [(q[0] - lo[0]) / span, (q[1] - lo[1]) / span]
            } else {
                [0.5, 0.5]
            }
        })
        .collect()
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Vertices,
    Edges,
}

fn parse_err(line: usize, reason: impl Into<String>) -> LayoutError {
    LayoutError::Parse { line, reason: reason.into() }
}

/// Splits a vertex line into id, label and the remaining fields.
fn split_vertex(line: &str, line_no: usize) -> Result<(usize, String, Vec<&str>), LayoutError> {
    let line = line.trim();
    let (id, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let id: usize = id.parse().map_err(|_| parse_err(line_no, format!("bad vertex id {id:?}")))?;
    let rest = rest.trim_start();
    let (label, tail) = if let Some(stripped) = rest.strip_prefix('"') {
        let end = stripped.find('"').ok_or_else(|| parse_err(line_no, "unterminated label"))?;
        (stripped[..end].to_string(), &stripped[end + 1..])
    } else {
        let (l, t) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        (l.to_string(), t)
    };
    if label.is_empty() {
        return Err(parse_err(line_no, "missing vertex label"));
    }
    Ok((id, label, tail.split_whitespace().collect()))
}

/// Parses a `.net` file with `*Vertices` and `*Edges` sections. Returns the
/// graph and, when every vertex line carries coordinates, the positions.
pub fn import_pajek(text: &str) -> Result<(WeightedGraph, Option<Vec<[f64; 2]>>), LayoutError> {
    let mut section = Section::Preamble;
    let mut expected = 0usize;
    let mut labels: Vec<String> = Vec::new();
    let mut coords: Vec<Option<[f64; 2]>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('*') {
            let mut parts = header.split_whitespace();
            let name = parts.next().unwrap_or("").to_ascii_lowercase();
            match name.as_str() {
                "vertices" => {
                    if section != Section::Preamble {
                        return Err(parse_err(line_no, "repeated *Vertices section"));
                    }
                    let count = parts.next().ok_or_else(|| parse_err(line_no, "missing vertex count"))?;
                    expected = count.parse().map_err(|_| parse_err(line_no, format!("bad vertex count {count:?}")))?;
                    section = Section::Vertices;
                }
                "edges" => {
                    if section != Section::Vertices {
                        return Err(parse_err(line_no, "*Edges before *Vertices"));
                    }
                    section = Section::Edges;
                }
                other => return Err(parse_err(line_no, format!("unsupported section *{other}"))),
            }
            continue;
        }
        match section {
            Section::Preamble => return Err(parse_err(line_no, "data before *Vertices")),
            Section::Vertices => {
                let (id, label, rest) = split_vertex(trimmed, line_no)?;
                if id != labels.len() + 1 {
                    return Err(parse_err(line_no, format!("vertex id {id} out of sequence")));
                }
                if id > expected {
                    return Err(parse_err(line_no, format!("more than {expected} vertices")));
                }
                let xy = if rest.len() >= 2 {
                    let x: f64 = rest[0].parse().map_err(|_| parse_err(line_no, "bad x coordinate"))?;
                    let y: f64 = rest[1].parse().map_err(|_| parse_err(line_no, "bad y coordinate"))?;
                    Some([x, y])
                } else {
                    None
                };
                labels.push(label);
                coords.push(xy);
            }
            Section::Edges => {
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() < 2 {
                    return Err(parse_err(line_no, "edge needs two vertex ids"));
                }
                let a: usize = fields[0].parse().map_err(|_| parse_err(line_no, "bad source id"))?;
                let b: usize = fields[1].parse().map_err(|_| parse_err(line_no, "bad target id"))?;
                if a == 0 || b == 0 || a > expected || b > expected {
                    return Err(parse_err(line_no, format!("edge {a} {b} outside 1..={expected}")));
                }
                if a == b {
                    return Err(parse_err(line_no, "self-loop"));
                }
                let weight = match fields.get(2) {
                    Some(w) => w.parse::<f64>().map_err(|_| parse_err(line_no, format!("bad weight {w:?}")))?,
                    None => 1.0,
                };
                edges.push(Edge { i: a.min(b) - 1, j: a.max(b) - 1, weight });
            }
        }
    }
    if section == Section::Preamble {
        return Err(parse_err(0, "no *Vertices section"));
    }
    if labels.len() != expected {
        return Err(parse_err(0, format!("expected {expected} vertices, found {}", labels.len())));
    }
    let graph = WeightedGraph::new(labels, edges).map_err(|e| parse_err(0, e.to_string()))?;
    let positions = if !coords.is_empty() && coords.iter().all(Option::is_some) {
        Some(coords.into_iter().flatten().collect())
    } else {
        None
    };
    Ok((graph, positions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes() -> WeightedGraph {
        WeightedGraph::new(vec!["a".into(), "b c".into()], vec![Edge { i: 0, j: 1, weight: 2.5 }]).unwrap()
    }

    #[test]
    fn two_node_round_trip() {
        let text = export_pajek(&two_nodes(), None);
        assert_eq!(text, "*Vertices 2\n1 \"a\"\n2 \"b c\"\n*Edges\n1 2 2.5\n");
        let (g, pos) = import_pajek(&text).unwrap();
        assert_eq!(g, two_nodes());
        assert!(pos.is_none());
    }

    #[test]
    fn coordinates_are_normalized() {
        let text = export_pajek(&two_nodes(), Some(&[[-1.0, 3.0], [1.0, 3.0]]));
        assert!(text.contains("1 \"a\" 0.0000 0.0000\n"));
        assert!(text.contains("2 \"b c\" 1.0000 0.0000\n"));
        let (_, pos) = import_pajek(&text).unwrap();
        assert_eq!(pos.unwrap(), vec![[0.0, 0.0], [1.0, 0.0]]);
    }

    #[test]
    fn empty_edge_set() {
        let g = WeightedGraph::new(vec!["x".into(), "y".into()], vec![]).unwrap();
        let text = export_pajek(&g, None);
        assert!(text.ends_with("*Edges\n"));
        assert_eq!(import_pajek(&text).unwrap().0, g);
    }

    #[test]
    fn tolerant_reading() {
        let text = "% comment\r\n*vertices 2\r\n1 a\r\n2 \"b\"\r\n*edges\r\n2 1\r\n";
        let (g, _) = import_pajek(text).unwrap();
        assert_eq!(g.edges(), &[Edge { i: 0, j: 1, weight: 1.0 }]);
        assert_eq!(g.node_labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(import_pajek("*Vertices 2\n1 \"a\"\n"), Err(LayoutError::Parse { .. })));
        assert!(matches!(import_pajek("*Vertices 1\n1 \"a\"\n*Edges\n1 2\n"), Err(LayoutError::Parse { line: 4, .. })));
        assert!(matches!(import_pajek("*Arcs\n"), Err(LayoutError::Parse { line: 1, .. })));
        assert!(matches!(import_pajek("*Vertices 2\n1 \"a\n"), Err(LayoutError::Parse { line: 2, .. })));
    }
}
