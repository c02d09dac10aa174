//! Deterministic SVG rendering of a [`Scene`]. Coordinates are printed with
//! a fixed number of decimals so identical scenes give identical bytes.

use std::fmt::Write as _;

use hyperglue_core::linf2::{ConvexPolygon, Vec2};
use hyperglue_core::s5::{Scene, ScenePanel};

const PANEL: f64 = 360.0;
const MARGIN: f64 = 40.0;
const HEADER: f64 = 36.0;
const NOTE_LINE: f64 = 18.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps `[-view, view]^2` onto one panel; `y` grows upwards.
struct Frame {
    left: f64,
    top: f64,
    view: f64,
}

impl Frame {
    fn map(&self, p: Vec2) -> (f64, f64) {
        let s = PANEL / (2.0 * self.view);
        (self.left + (p.x + self.view) * s, self.top + (self.view - p.y) * s)
    }

    fn point(&self, p: Vec2) -> String {
        let (x, y) = self.map(p);
        format!("{},{}", num(x), num(y))
    }

    fn points(&self, vs: &[Vec2]) -> String {
        vs.iter().map(|v| self.point(*v)).collect::<Vec<_>>().join(" ")
    }
}

fn axes(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888888" stroke-width="1"/>"##,
        num(f.left),
        num(f.top),
        num(PANEL),
        num(PANEL)
    );
    let v = f.view;
    for (p, q) in [(Vec2::new(-v, 0.0), Vec2::new(v, 0.0)), (Vec2::new(0.0, -v), Vec2::new(0.0, v))] {
        let (x1, y1) = f.map(p);
        let (x2, y2) = f.map(q);
        let _ = writeln!(
            out,
            r##"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-width="1"/>"##,
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }
}

fn shape(out: &mut String, f: &Frame, poly: &ConvexPolygon, color: &str, class: &str, opacity: f64) {
    match poly.vertices() {
        [] => {}
        [p] => {
            let (x, y) = f.map(*p);
            let _ = writeln!(out, r#"<circle class="{class}" cx="{}" cy="{}" r="3" fill="{color}"/>"#, num(x), num(y));
        }
        [_, _] => {
            let _ = writeln!(
                out,
                r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="3"/>"#,
                f.points(poly.vertices())
            );
        }
        vs => {
            let _ = writeln!(
                out,
                r#"<polygon class="{class}" points="{}" fill="{color}" fill-opacity="{}" stroke="{color}" stroke-width="1.5"/>"#,
                f.points(vs),
                num(opacity)
            );
        }
    }
}

fn label(out: &mut String, x: f64, y: f64, text: &str, size: u32) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{size}">{}</text>"#,
        num(x),
        num(y),
        escape(text)
    );
}

fn panel(out: &mut String, f: &Frame, p: &ScenePanel) {
    let _ = writeln!(out, "<g class=\"panel\">");
    shape(out, f, &p.region, "#f2f2f2", "sheet", 1.0);
    axes(out, f);
    for (i, (_, trace)) in p.traces.iter().enumerate() {
        shape(out, f, trace, PALETTE[i % PALETTE.len()], "trace", 0.2);
    }
    let (x1, y1) = f.map(p.gluing.0);
    let (x2, y2) = f.map(p.gluing.1);
    let _ = writeln!(
        out,
        r##"<line class="gluing" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-width="2" stroke-dasharray="6 3"/>"##,
        num(x1),
        num(y1),
        num(x2),
        num(y2)
    );
    for (name, c) in &p.centers {
        let (x, y) = f.map(*c);
        let color = name
            .strip_prefix('x')
            .and_then(|k| k.parse::<usize>().ok())
            .map_or(PALETTE[0], |k| PALETTE[(k + PALETTE.len() - 1) % PALETTE.len()]);
        let _ = writeln!(out, r#"<circle class="center" cx="{}" cy="{}" r="4" fill="{color}"/>"#, num(x), num(y));
        label(out, x + 6.0, y - 6.0, name, 12);
    }
    for (name, m) in &p.marks {
        let (x, y) = f.map(*m);
        let _ = writeln!(
            out,
            r##"<path class="mark" d="M{} {}L{} {}M{} {}L{} {}" stroke="#000000" stroke-width="1.5"/>"##,
            num(x - 4.0),
            num(y - 4.0),
            num(x + 4.0),
            num(y + 4.0),
            num(x - 4.0),
            num(y + 4.0),
            num(x + 4.0),
            num(y - 4.0)
        );
        label(out, x + 5.0, y + 14.0, name, 10);
    }
    label(out, f.left, f.top - 8.0, &p.title, 13);
    let _ = writeln!(out, "</g>");
}

/// Renders the panels side by side. A scene without panels gives one empty
/// frame with axes.
pub fn emit_svg(scene: &Scene) -> String {
    let view = if scene.view > 0.0 && scene.view.is_finite() { scene.view } else { 1.0 };
    let count = scene.panels.len().max(1);
    let width = MARGIN + count as f64 * (PANEL + MARGIN);
    let height = HEADER + MARGIN + PANEL + MARGIN + NOTE_LINE * scene.notes.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if !scene.title.is_empty() {
        label(&mut out, MARGIN, 24.0, &scene.title, 16);
    }
    let top = HEADER + MARGIN;
    if scene.panels.is_empty() {
        axes(&mut out, &Frame { left: MARGIN, top, view });
    }
    for (k, p) in scene.panels.iter().enumerate() {
        let f = Frame { left: MARGIN + k as f64 * (PANEL + MARGIN), top, view };
        panel(&mut out, &f, p);
    }
    for (i, n) in scene.notes.iter().enumerate() {
        label(&mut out, MARGIN, top + PANEL + MARGIN * 0.75 + NOTE_LINE * i as f64, n, 12);
    }
    out.push_str("</svg>\n");
    out
}
