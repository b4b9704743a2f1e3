//! Static SVG diagnostics of an analysis.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{BBox, Point2};
use crate::index::orientation_change_vertices;
use crate::input::Problem;
use crate::pipeline::Analysis;

const WIDTH: f64 = 800.0;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("nothing to render: {0}")]
    NoArrangement(String),
}

/// Maps plane coordinates to SVG pixels (y pointing down).
struct Frame {
    min: Point2,
    max_y: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(b: &BBox) -> Self {
        let pad = 0.1 * b.width().max(b.height());
        let min = Point2::new(b.min.x - pad, b.min.y - pad);
        let w = b.width() + 2.0 * pad;
        let h = b.height() + 2.0 * pad;
        let scale = WIDTH / w;
        Self {
            min,
            max_y: b.max.y + pad,
            scale,
            height: (h * scale).round(),
        }
    }

    fn x(&self, p: Point2) -> f64 {
        (p.x - self.min.x) * self.scale
    }

    fn y(&self, p: Point2) -> f64 {
        (self.max_y - p.y) * self.scale
    }

    fn xy(&self, p: Point2) -> String {
        format!("{:.3},{:.3}", self.x(p), self.y(p))
    }
}

fn fill_for(omega: i64) -> String {
    if omega == 0 {
        return "#f0f0f0".into();
    }
    let level = (omega.unsigned_abs().min(4) as f64) / 4.0;
    let light = (235.0 - 150.0 * level).round() as u8;
    if omega > 0 {
        format!("#{light:02x}{light:02x}ff")
    } else {
        format!("#ff{light:02x}{light:02x}")
    }
}

/// SVG 1.1 document: faces shaded by winding number with `omega` and index
/// labels, the oriented orbit polygon, orbit points, orientation-change
/// vertices and the fixed point.
pub fn render_svg(problem: &Problem, analysis: &Analysis) -> Result<String, RenderError> {
    let arr = analysis.arrangement.as_ref().ok_or_else(|| {
        RenderError::NoArrangement(
            analysis
                .failure
                .as_ref()
                .map_or_else(|| "no arrangement".into(), |f| f.message.clone()),
        )
    })?;
    let pts = problem.orbit.points();
    let b = BBox::of_points(pts).expect("non-empty orbit");
    let fr = Frame::new(&b);
    let unit = b.width().max(b.height()) * fr.scale;
    let font = (unit / 40.0).clamp(8.0, 16.0);
    let mut s = String::new();

    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = WIDTH,
        h = fr.height
    );
    let _ = writeln!(
        s,
        "<title>{} (n = {})</title>",
        problem.map.family(),
        problem.orbit.period()
    );
    let _ = writeln!(
        s,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#222"/></marker></defs>"##
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{:.0}" height="{:.0}" fill="#ffffff"/>"##,
        WIDTH, fr.height
    );

    let _ = writeln!(s, r#"<g id="faces" stroke="none">"#);
    for f in arr.bounded_faces() {
        let poly: Vec<String> = arr
            .face_polygon(f.id)
            .into_iter()
            .map(|p| fr.xy(p))
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon id="face-{}" points="{}" fill="{}"/>"#,
            f.id,
            poly.join(" "),
            fill_for(f.omega)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r##"<g id="gamma" stroke="#222" stroke-width="1.5" marker-end="url(#arrow)">"##
    );
    let n = pts.len();
    for i in 0..n {
        let (a, c) = (pts[i], pts[(i + 1) % n]);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            fr.x(a),
            fr.y(a),
            fr.x(c),
            fr.y(c)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r##"<g id="orientation-changes" fill="none" stroke="#e08000" stroke-width="2">"##
    );
    let mut changes: Vec<usize> = arr
        .bounded_faces()
        .flat_map(|f| orientation_change_vertices(arr, f.id))
        .collect();
    changes.sort_unstable();
    changes.dedup();
    for v in changes {
        let p = arr.vertices[v];
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.1}"/>"#,
            fr.x(p),
            fr.y(p),
            font * 0.5
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="orbit" fill="#000">"##);
    for (i, &p) in pts.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#,
            fr.x(p),
            fr.y(p)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="{:.1}" font-family="sans-serif">{i}</text>"#,
            fr.x(p) + 4.0,
            fr.y(p) - 4.0,
            font * 0.8
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<g id="labels" font-family="sans-serif" text-anchor="middle">"#
    );
    for row in analysis.face_rows.iter().filter(|r| r.bounded) {
        let p = arr.faces[row.id].sample_point;
        let ind = row.comb_index.map_or_else(|| "?".into(), |v| v.to_string());
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="{:.1}">ω={}, Ind={}</text>"#,
            fr.x(p),
            fr.y(p),
            font,
            row.omega,
            ind
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some(fp) = &analysis.fixed_point {
        let p = fp.location;
        let (x, y, r) = (fr.x(p), fr.y(p), font * 0.6);
        let _ = writeln!(
            s,
            r##"<g id="fixed-point" stroke="#c00000" stroke-width="2"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/></g>"##,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
