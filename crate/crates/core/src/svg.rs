//! SVG 1.1 output for network layouts and rank-frequency plots.

use std::fmt::Write as _;

use crate::layout::{HighlightSet, Layout2D};
use crate::neighbors::{CooccurrenceGraph, GraphStats};
use crate::stats::ZipfProfile;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const CAPTION_HEIGHT: f64 = 30.0;
/// Graphs with more edges than this are drawn as points only.
pub const MAX_DRAWN_EDGES: usize = 20_000;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Figure caption in the style `beta=5 range=[2-20] N=4479 ⟨neighbours⟩=1.00`.
pub fn caption(stats: &GraphStats) -> String {
    format!(
        "beta={} range={} N={} ⟨neighbours⟩={:.2}",
        crate::tsv::bound(stats.beta),
        stats.band,
        stats.n_nodes,
        stats.mean_links
    )
}

/// Draws a layout: one circle per node, highlighted terms in red, edges
/// when `graph` is given and small enough, and `caption` under the frame.
pub fn network(
    layout: &Layout2D,
    graph: Option<&CooccurrenceGraph>,
    highlights: &HighlightSet,
    caption: &str,
) -> String {
    let inner = SIZE - 2.0 * MARGIN;
    let px = |(x, y): (f64, f64)| (MARGIN + x * inner, MARGIN + (1.0 - y) * inner);
    let mut out = String::new();
    header(&mut out, SIZE, SIZE + CAPTION_HEIGHT);

    if let Some(g) = graph.filter(|g| g.n_edges() <= MAX_DRAWN_EDGES) {
        let _ = writeln!(out, r##"<g stroke="#999999" stroke-width="0.3" stroke-opacity="0.6">"##);
        for (a, b) in g.edges() {
            let (x1, y1) = px(layout.coords[a]);
            let (x2, y2) = px(layout.coords[b]);
            let _ = writeln!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
        }
        let _ = writeln!(out, "</g>");
    }

    let r = if layout.len() > 2000 { 1.5 } else { 3.0 };
    let mut marked = Vec::new();
    let _ = writeln!(out, "<g>");
    for (name, &p) in layout.names.iter().zip(&layout.coords) {
        if highlights.contains(name) {
            marked.push((name, p));
            continue;
        }
        let (cx, cy) = px(p);
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="black"><title>{}</title></circle>"#,
            escape(name)
        );
    }
    // drawn last so they stay visible on dense plots
    for (name, p) in marked {
        let (cx, cy) = px(p);
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="red"><title>{}</title></circle>"#,
            escape(name)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE + CAPTION_HEIGHT / 2.0,
        escape(caption)
    );
    out.push_str("</svg>\n");
    out
}

/// Log-log rank-frequency scatter with the fitted line.
pub fn zipf_plot(profile: &ZipfProfile, title: &str) -> String {
    let inner = SIZE - 2.0 * MARGIN;
    let max_lr = profile.points.last().map(|p| (p.0 as f64).ln()).unwrap_or(1.0).max(1.0);
    let max_lf = profile.points.first().map(|p| (p.1 as f64).ln()).unwrap_or(1.0).max(1.0);
    let px = |lr: f64, lf: f64| (MARGIN + lr / max_lr * inner, MARGIN + (1.0 - lf / max_lf) * inner);
    let mut out = String::new();
    header(&mut out, SIZE, SIZE + CAPTION_HEIGHT);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(out, r#"<g fill="black">"#);
    for &(rank, freq) in &profile.points {
        let (cx, cy) = px((rank as f64).ln(), (freq as f64).ln());
        let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="1.5"/>"#);
    }
    let _ = writeln!(out, "</g>");
    let (x1, y1) = px(0.0, profile.intercept);
    let (x2, y2) = px(max_lr, profile.intercept + profile.slope * max_lr);
    let _ = writeln!(
        out,
        r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="red" stroke-width="1.5"/>"#
    );
    let label = format!(
        "{} slope={:.3} r2={:.3} {}",
        title, profile.slope, profile.r2, profile.classification
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE + CAPTION_HEIGHT / 2.0,
        escape(&label)
    );
    out.push_str("</svg>\n");
    out
}

/// Placeholder drawing for a band that kept no linked items.
pub fn empty_network(caption: &str) -> String {
    let mut out = String::new();
    header(&mut out, SIZE, SIZE + CAPTION_HEIGHT);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE + CAPTION_HEIGHT / 2.0,
        escape(caption)
    );
    out.push_str("</svg>\n");
    out
}
