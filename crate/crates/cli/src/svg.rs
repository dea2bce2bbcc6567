//! Self-contained SVG figures, fitted to their contents.

use std::fmt::Write;

use crate::error::CliError;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Side,
    Chord,
    Overlay,
    Asymptote,
    Frame,
    Slice(usize),
}

impl Style {
    fn attrs(self) -> String {
        const PALETTE: [&str; 4] = ["#1f4e9c", "#b5411c", "#2f7d32", "#7a3e9d"];
        match self {
            Style::Side => r##"stroke="#111" stroke-width="2""##.into(),
            Style::Chord => r##"stroke="#888" stroke-width="1" stroke-dasharray="4 3""##.into(),
            Style::Overlay => r##"stroke="#c0392b" stroke-width="1" stroke-dasharray="6 4""##.into(),
            Style::Asymptote => r##"stroke="#555" stroke-width="1" stroke-dasharray="1 3""##.into(),
            Style::Frame => r##"stroke="#aaa" stroke-width="1""##.into(),
            Style::Slice(i) => format!(r#"stroke="{}" stroke-width="1.5""#, PALETTE[i % PALETTE.len()]),
        }
    }
}

enum Item {
    Path { points: Vec<Point>, closed: bool, style: Style },
    Circle { center: Point, radius: f64, style: Style },
    Dot { at: Point },
    Label { at: Point, text: String },
}

#[derive(Default)]
pub struct Figure {
    title: String,
    items: Vec<Item>,
}

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

impl Figure {
    pub fn new(title: impl Into<String>) -> Self {
        Figure { title: title.into(), items: Vec::new() }
    }

    pub fn line(&mut self, a: Point, b: Point, style: Style) {
        self.path(vec![a, b], false, style);
    }

    pub fn path(&mut self, points: Vec<Point>, closed: bool, style: Style) {
        let points: Vec<Point> = points.into_iter().filter(|p| p.iter().all(|x| x.is_finite())).collect();
        if points.len() >= 2 {
            self.items.push(Item::Path { points, closed, style });
        }
    }

    pub fn circle(&mut self, center: Point, radius: f64, style: Style) {
        self.items.push(Item::Circle { center, radius, style });
    }

    pub fn dot(&mut self, at: Point) {
        self.items.push(Item::Dot { at });
    }

    /// Text next to a point; `_n^±`-style suffixes are drawn as sub- and
    /// superscripts.
    pub fn label(&mut self, at: Point, text: impl Into<String>) {
        self.items.push(Item::Label { at, text: text.into() });
    }

    fn bounds(&self) -> Option<(Point, Point)> {
        let mut pts: Vec<Point> = Vec::new();
        for item in &self.items {
            match item {
                Item::Path { points, .. } => pts.extend(points.iter().copied()),
                Item::Circle { center, radius, .. } => {
                    pts.push([center[0] - radius, center[1] - radius]);
                    pts.push([center[0] + radius, center[1] + radius]);
                }
                Item::Dot { at } => pts.push(*at),
                Item::Label { .. } => {}
            }
        }
        let first = *pts.first()?;
        Some(pts.iter().fold((first, first), |(lo, hi), p| {
            ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])])
        }))
    }

    pub fn render(&self) -> Result<String, CliError> {
        let (lo, hi) = self.bounds().ok_or_else(|| CliError::Usage("nothing to draw: the polygon is empty".into()))?;
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let width = (hi[0] - lo[0]) * scale + 2.0 * MARGIN;
        let height = (hi[1] - lo[1]) * scale + 2.0 * MARGIN;
        let map = |p: &Point| [MARGIN + (p[0] - lo[0]) * scale, height - MARGIN - (p[1] - lo[1]) * scale];

        let mut s = String::new();
        writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(s, "<!-- lengthen {} -->", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
        )
        .unwrap();
        writeln!(s, "<title>{}</title>", escape(&self.title)).unwrap();
        writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        for item in &self.items {
            match item {
                Item::Path { points, closed, style } => {
                    let coords: Vec<String> = points.iter().map(|p| {
                        let q = map(p);
                        format!("{:.2},{:.2}", q[0], q[1])
                    }).collect();
                    let tag = if *closed { "polygon" } else { "polyline" };
                    writeln!(s, r#"<{tag} points="{}" fill="none" {}/>"#, coords.join(" "), style.attrs()).unwrap();
                }
                Item::Circle { center, radius, style } => {
                    let c = map(center);
                    writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" {}/>"#, c[0], c[1], radius * scale, style.attrs())
                        .unwrap();
                }
                Item::Dot { at } => {
                    let c = map(at);
                    writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#111"/>"##, c[0], c[1]).unwrap();
                }
                Item::Label { at, text } => {
                    let c = map(at);
                    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="serif" font-size="13">{}</text>"#, c[0] + 5.0, c[1] - 5.0, markup(text))
                        .unwrap();
                }
            }
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `P_3^+` becomes `P` with subscript `3` and superscript `+`.
fn markup(text: &str) -> String {
    let Some((base, rest)) = text.split_once('_') else { return escape(text) };
    let (sub, sup) = rest.split_once('^').unwrap_or((rest, ""));
    let mut out = format!(r#"{}<tspan baseline-shift="sub" font-size="10">{}</tspan>"#, escape(base), escape(sub));
    if !sup.is_empty() {
        write!(out, r#"<tspan baseline-shift="super" font-size="10">{}</tspan>"#, escape(sup)).unwrap();
    }
    out
}
