// SPDX-License-Identifier: Apache-2.0
//! SVG pictures of scattering diagrams and tropical curves.
//!
//! Pictures are for people only. Coordinates are converted to floating
//! point here and nowhere else.

use std::fmt::Write;

use num_traits::ToPrimitive;

use tropvert::scattering::{Point, ScatteringDiagram, WallKind};
use tropvert::tropical::TropicalCurveRecord;
use tropvert::LatticeVector;

const SIZE: f64 = 480.0;
const PANEL: f64 = 240.0;
const PER_ROW: usize = 4;

fn xy(p: &Point) -> (f64, f64) {
    (p.x.to_f64().unwrap_or(0.0), p.y.to_f64().unwrap_or(0.0))
}

fn unit(d: LatticeVector) -> (f64, f64) {
    let (a, b) = (d.a as f64, d.b as f64);
    let n = (a * a + b * b).sqrt();
    (a / n, b / n)
}

/// Maps model coordinates in `[-extent, extent]^2` to a square of side
/// `size` with the y axis pointing up.
struct Frame {
    cx: f64,
    cy: f64,
    extent: f64,
    size: f64,
    ox: f64,
    oy: f64,
}

impl Frame {
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let s = self.size / (2.0 * self.extent);
        (self.ox + (x - self.cx) * s + self.size / 2.0, self.oy + self.size / 2.0 - (y - self.cy) * s)
    }

    fn segment(&self, out: &mut String, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        );
    }

    fn text(&self, out: &mut String, at: (f64, f64), label: &str, size: u32) {
        let (x, y) = self.map(at);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="monospace">{label}</text>"#);
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Lines in black, rays in blue, each ray labelled by its direction.
pub fn diagram(d: &ScatteringDiagram) -> String {
    let bases: Vec<(f64, f64)> = d.walls().iter().map(|w| xy(&w.base)).collect();
    let reach = bases.iter().fold(0.0f64, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    let extent = 2.0 * reach.max(1.0);
    let frame = Frame { cx: 0.0, cy: 0.0, extent, size: SIZE, ox: 0.0, oy: 0.0 };
    let far = 4.0 * extent;
    let mut out = header(SIZE, SIZE);
    for (w, &(bx, by)) in d.walls().iter().zip(&bases) {
        let (ux, uy) = unit(w.direction());
        let end = (bx + far * ux, by + far * uy);
        match w.kind {
            WallKind::Line => frame.segment(&mut out, (bx - far * ux, by - far * uy), end, "black", 1.5),
            WallKind::Ray => {
                frame.segment(&mut out, (bx, by), end, "#1f5fbf", 1.0);
                let label_at = (bx + 0.85 * extent * ux, by + 0.85 * extent * uy);
                frame.text(&mut out, label_at, &w.direction().to_string(), 10);
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One panel per curve, with its multiplicity underneath.
pub fn curves(curves: &[TropicalCurveRecord]) -> String {
    let rows = curves.len().div_ceil(PER_ROW).max(1);
    let cols = curves.len().clamp(1, PER_ROW);
    let mut out = header(cols as f64 * PANEL, rows as f64 * PANEL);
    for (n, c) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = if c.vertices.is_empty() { vec![xy(&c.anchor)] } else { c.vertices.iter().map(xy).collect() };
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for &(x, y) in &pts {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let extent = (0.5 * (hi.0 - lo.0).max(hi.1 - lo.1)).max(0.5) * 1.6;
        let frame = Frame {
            cx: 0.5 * (lo.0 + hi.0),
            cy: 0.5 * (lo.1 + hi.1),
            extent,
            size: PANEL,
            ox: (n % PER_ROW) as f64 * PANEL,
            oy: (n / PER_ROW) as f64 * PANEL,
        };
        for e in &c.edges {
            let from = pts[if c.vertices.is_empty() { 0 } else { e.from }];
            let to = match e.to {
                Some(t) => pts[t],
                None => {
                    let (ux, uy) = unit(e.direction);
                    (from.0 + 2.0 * extent * ux, from.1 + 2.0 * extent * uy)
                }
            };
            let colour = if e.id == c.out_edge { "#bf3f1f" } else { "black" };
            frame.segment(&mut out, from, to, colour, 0.8 + 0.6 * e.weight as f64);
        }
        let label_at = (frame.cx - 0.95 * extent, frame.cy - 0.9 * extent);
        frame.text(&mut out, label_at, &format!("Mult {}", c.multiplicity), 11);
    }
    out.push_str("</svg>\n");
    out
}
