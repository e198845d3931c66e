//! SVG drawings of tables and trajectories. One user unit is one centimetre;
//! the y axis points up.

use std::fmt::Write;

use crate::geometry::{Table, Vec2};

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub margin: f64,
    pub stroke: f64,
    pub labels: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            margin: 0.5,
            stroke: 0.03,
            labels: true,
        }
    }
}

const PALETTE: [&str; 6] = ["#c0392b", "#2471a3", "#229954", "#7d3c98", "#ca6f1e", "#17202a"];

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn points(p: &[Vec2]) -> String {
    p.iter()
        .map(|v| format!("{},{}", num(v.x), num(v.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The table outline with each path drawn as a polyline of contact points.
pub fn svg(table: &Table, paths: &[Vec<Vec2>], style: &SvgStyle) -> String {
    let verts = table.polygon().vertices();
    let (mut lo, mut hi) = (verts[0], verts[0]);
    for v in verts.iter().chain(paths.iter().flatten()) {
        lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let m = style.margin;
    let (w, h) = (hi.x - lo.x + 2.0 * m, hi.y - lo.y + 2.0 * m);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}cm" height="{h}cm" viewBox="{x0} {y0} {w} {h}">"#,
        w = num(w),
        h = num(h),
        x0 = num(lo.x - m),
        y0 = num(-hi.y - m),
    );
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    let _ = writeln!(
        out,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
        points(verts),
        num(2.0 * style.stroke)
    );
    for (i, p) in paths.iter().enumerate() {
        if p.len() < 2 {
            continue;
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}" stroke-linejoin="round"/>"#,
            points(p),
            PALETTE[i % PALETTE.len()],
            num(style.stroke)
        );
    }
    out.push_str("</g>\n");
    if style.labels {
        let c = table.polygon().centroid();
        let size = (0.04 * table.diameter()).max(0.1);
        for side in 0..table.sides() {
            let a = verts[side];
            let b = verts[(side + 1) % verts.len()];
            let mid = (a + b) * 0.5;
            let at = mid + (mid - c).normalized() * (0.6 * size);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                num(at.x),
                num(-at.y),
                num(size),
                escape(table.label(side))
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
