//! SVG rendering of drawings.

use std::fmt::Write;

use ortho_core::drawing::Drawing;
use ortho_core::geom::Point;
use ortho_core::graph::Multigraph;

use crate::pipeline::DebugLayers;

const PAD: f64 = 20.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `d`; `graph` supplies labels and must match `d.boxes` in order.
/// The y axis is flipped so that larger y is drawn higher up.
pub fn emit_svg(graph: &Multigraph, d: &Drawing, debug: Option<&DebugLayers>) -> String {
    let Some(mut b) = d.bounds() else {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"/>\n".into();
    };
    if let Some(dbg) = debug {
        for c in &dbg.channels {
            b = b.union(c);
        }
    }
    let (w, h) = (b.width() + 2.0 * PAD, b.height() + 2.0 * PAD);
    let tx = |p: Point| (p.x - b.x0 + PAD, b.y1 - p.y + PAD);
    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.2}\" height=\"{h:.2}\" viewBox=\"0 0 {w:.2} {h:.2}\">");
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    if let Some(dbg) = debug {
        let _ = writeln!(s, "<g id=\"channels\" fill=\"#4a90d9\" fill-opacity=\"0.06\" stroke=\"#4a90d9\" stroke-opacity=\"0.3\" stroke-width=\"0.5\">");
        for c in &dbg.channels {
            let (x, y) = tx(Point::new(c.x0, c.y1));
            let _ = writeln!(s, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>", c.width(), c.height());
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "<g id=\"representatives\" stroke=\"#e08a00\" stroke-width=\"0.75\" stroke-dasharray=\"3 2\">");
        for r in &dbg.representatives {
            let (a, c) = r.endpoints();
            let ((x1, y1), (x2, y2)) = (tx(a), tx(c));
            let _ = writeln!(s, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>");
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "<g id=\"boxes\" fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"1\">");
    for (i, bx) in d.boxes.iter().enumerate() {
        let r = bx.rect();
        let (x, y) = tx(Point::new(r.x0, r.y1));
        let _ = writeln!(s, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>", r.width(), r.height());
        let label = graph.vertices().get(i).map(|v| v.label.clone().unwrap_or_else(|| v.id.to_string())).unwrap_or_default();
        let (cx, cy) = tx(bx.center);
        let _ = writeln!(
            s,
            "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\" stroke=\"none\" fill=\"black\">{}</text>",
            esc(&label)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "<g id=\"edges\" fill=\"none\" stroke=\"#222\" stroke-width=\"1.25\">");
    for e in &d.edges {
        let pts: Vec<String> = e.points.iter().map(|&p| {
            let (x, y) = tx(p);
            format!("{x:.2},{y:.2}")
        }).collect();
        let _ = writeln!(s, "<polyline data-edge=\"{}\" points=\"{}\"/>", e.id, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");
    if let Some(dbg) = debug {
        let _ = writeln!(s, "<g id=\"constraints\" stroke=\"#c0392b\" stroke-opacity=\"0.5\" stroke-width=\"0.5\">");
        for &(a, c) in &dbg.arcs {
            let ((x1, y1), (x2, y2)) = (tx(a), tx(c));
            let _ = writeln!(s, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>");
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
