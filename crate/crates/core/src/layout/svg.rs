//! SVG rendering of a laid-out graph: labeled nodes, edges whose stroke
//! width grows linearly with weight.

use std::fmt::Write as _;

use super::{LayoutError, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub min_stroke_px: f64,
    pub max_stroke_px: f64,
    pub node_radius: f64,
    pub font_size: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 800.0,
            margin: 60.0,
            min_stroke_px: 0.5,
            max_stroke_px: 4.0,
            node_radius: 5.0,
            font_size: 12.0,
        }
    }
}

/// Linear map of `weight` from `[min_w, max_w]` onto the style's pixel
/// range. When all weights are equal every line gets the midpoint width.
pub fn stroke_width(weight: f64, min_w: f64, max_w: f64, style: &SvgStyle) -> f64 {
    if max_w > min_w {
        style.min_stroke_px + (weight - min_w) / (max_w - min_w) * (style.max_stroke_px - style.min_stroke_px)
    } else {
        (style.min_stroke_px + style.max_stroke_px) / 2.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `g` at `positions` (in layout units) as an SVG 1.1 document.
pub fn export_svg(g: &WeightedGraph, positions: &[[f64; 2]], style: &SvgStyle) -> Result<String, LayoutError> {
    if positions.len() != g.node_count() {
        return Err(LayoutError::InvalidGraph(format!(
            "{} positions for {} nodes",
            positions.len(),
            g.node_count()
        )));
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in positions {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let inner = (style.width.min(style.height) - 2.0 * style.margin).max(1.0);
    let scale = if span > 0.0 { inner / span } else { 1.0 };
    // y grows downward in SVG, so flip it to keep the layout's orientation
    let to_px = |p: [f64; 2]| -> (f64, f64) {
        if span > 0.0 {
            (style.margin + (p[0] - lo[0]) * scale, style.height - style.margin - (p[1] - lo[1]) * scale)
        } else {
            (style.width / 2.0, style.height / 2.0)
        }
    };

    let min_w = g.edges().iter().map(|e| e.weight).fold(f64::INFINITY, f64::min);
    let max_w = g.edges().iter().map(|e| e.weight).fold(f64::NEG_INFINITY, f64::max);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r##"<g stroke="#555555" stroke-linecap="round">"##);
    for e in g.edges() {
        let (x1, y1) = to_px(positions[e.i]);
        let (x2, y2) = to_px(positions[e.j]);
        let w = stroke_width(e.weight, min_w, max_w, style);
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke-width="{w:.3}"><title>{}</title></line>"#,
            e.weight
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="{}">"#, style.font_size);
    for (label, p) in g.node_labels().iter().zip(positions) {
        let (x, y) = to_px(*p);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="{}" fill="#d33"/>"##, style.node_radius);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + style.node_radius + 2.0,
            y - style.node_radius,
            escape(label)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}
