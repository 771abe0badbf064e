//! SVG rendering of sampled curves with the light cone y = ±x as dashed
//! guides. Axes share one scale so hyperbolas keep their shape.

use std::fmt::Write;

use l2curves::{CurveSamples, PlanePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub size: f64,
    /// Also draw the point reflection `(x, y) -> (-x, -y)` (the other branch).
    pub mirror: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            size: 600.0,
            mirror: true,
        }
    }
}

const COLORS: [&str; 6] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#2c3e50"];

/// Polyline pieces, split where a coordinate is not finite.
fn pieces(points: &[PlanePoint]) -> Vec<Vec<PlanePoint>> {
    let mut out = vec![Vec::new()];
    for p in points {
        if p.is_finite() {
            out.last_mut().unwrap().push(*p);
        } else if !out.last().unwrap().is_empty() {
            out.push(Vec::new());
        }
    }
    out.retain(|v| v.len() > 1);
    out
}

pub fn render_svg(curves: &[CurveSamples], opts: PlotOptions) -> String {
    let mut pts: Vec<PlanePoint> = curves.iter().flat_map(|c| c.points().iter().copied()).collect();
    if opts.mirror {
        let m: Vec<PlanePoint> = pts.iter().map(|p| PlanePoint::new(-p.x, -p.y)).collect();
        pts.extend(m);
    }
    let finite = pts.iter().filter(|p| p.is_finite());
    let half = finite.fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let half = if half > 0.0 { 1.08 * half } else { 1.0 };
    let n = opts.size;
    let scale = n / (2.0 * half);
    let map = |p: PlanePoint| ((p.x + half) * scale, (half - p.y) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{n}" height="{n}" viewBox="0 0 {n} {n}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{n}" height="{n}" fill="white"/>"#);
    let mid = n / 2.0;
    let _ = writeln!(
        svg,
        "<g stroke=\"#b0b0b0\" stroke-width=\"0.8\"><line x1=\"0\" y1=\"{mid}\" x2=\"{n}\" y2=\"{mid}\"/><line x1=\"{mid}\" y1=\"0\" x2=\"{mid}\" y2=\"{n}\"/></g>"
    );
    // light cone
    let _ = writeln!(
        svg,
        "<g stroke=\"#808080\" stroke-width=\"1\" stroke-dasharray=\"6 4\"><line x1=\"0\" y1=\"{n}\" x2=\"{n}\" y2=\"0\"/><line x1=\"0\" y1=\"0\" x2=\"{n}\" y2=\"{n}\"/></g>"
    );
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut branches = vec![(c.points().to_vec(), 1.0)];
        if opts.mirror {
            branches.push((c.points().iter().map(|p| PlanePoint::new(-p.x, -p.y)).collect(), 0.45));
        }
        for (points, opacity) in branches {
            for piece in pieces(&points) {
                let mut d = String::new();
                for p in piece {
                    let (x, y) = map(p);
                    let _ = write!(d, "{x:.2},{y:.2} ");
                }
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" stroke-opacity="{opacity}" points="{}"/>"#,
                    d.trim_end()
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
