//! Minimal deterministic SVG writer with a y-up world frame.

use std::fmt::Write;

use invis_core::body::{Edge, EdgeSet};
use invis_core::geom::{Point2, Vec2};
use invis_core::{Body, Pair, Trajectory};

/// Samples per curved edge.
const EDGE_SAMPLES: usize = 96;

/// Axis-aligned world rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl Window {
    pub fn around(points: impl IntoIterator<Item = Point2<f64>>) -> Self {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = Point2::new(min.x.min(p.x), min.y.min(p.y));
            max = Point2::new(max.x.max(p.x), max.y.max(p.y));
        }
        Self { min, max }
    }

    /// Grows each side by `frac` of the larger extent.
    pub fn padded(self, frac: f64) -> Self {
        let m = frac * (self.max.x - self.min.x).max(self.max.y - self.min.y);
        Self {
            min: Point2::new(self.min.x - m, self.min.y - m),
            max: Point2::new(self.max.x + m, self.max.y + m),
        }
    }

    fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// Layers in drawing order; each element carries its layer as a class.
pub struct Canvas {
    window: Window,
    scale: f64,
    width: f64,
    height: f64,
    body: String,
}

impl Canvas {
    /// Uniform scale: the window fills `width` pixels horizontally.
    pub fn new(window: Window, width: f64) -> Self {
        assert!(
            window.width() > 0.0 && window.height() > 0.0,
            "empty world window"
        );
        let scale = width / window.width();
        Self {
            window,
            scale,
            width,
            height: window.height() * scale,
            body: String::new(),
        }
    }

    fn px(&self, p: Point2<f64>) -> (f64, f64) {
        (
            (p.x - self.window.min.x) * self.scale,
            (self.window.max.y - p.y) * self.scale,
        )
    }

    fn path_data(&self, pts: &[Point2<f64>], closed: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.px(*p);
            let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        d
    }

    pub fn path(&mut self, class: &str, pts: &[Point2<f64>], closed: bool, extra: &str) {
        let d = self.path_data(pts, closed);
        let _ = writeln!(self.body, r#"  <path class="{class}" d="{d}"{extra}/>"#);
    }

    pub fn dot(&mut self, class: &str, p: Point2<f64>, r: f64) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            r#"  <circle class="{class}" cx="{x:.3}" cy="{y:.3}" r="{r:.1}"/>"#
        );
    }

    pub fn label(&mut self, text: &str, p: Point2<f64>, dx: f64, dy: f64) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            r#"  <text class="label" x="{:.3}" y="{:.3}">{text}</text>"#,
            x + dx,
            y + dy
        );
    }

    pub fn finish(self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
            w = self.width,
            h = self.height
        );
        s.push_str(STYLE);
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

const STYLE: &str = r#"  <style>
    .conic { fill: none; stroke: #1f4e9c; stroke-width: 1.5; }
    .edge { fill: none; stroke: #111; stroke-width: 1.5; }
    .body { fill: #c9c9c9; stroke: none; }
    .dashed { fill: none; stroke: #666; stroke-width: 1; stroke-dasharray: 6 4; }
    .trajectory { fill: none; stroke: #c0392b; stroke-width: 1.2; }
    .focus { fill: #111; }
    .point { fill: #c0392b; }
    .label { font: 14px sans-serif; fill: #111; }
  </style>
"#;

fn edge_points(e: &Edge<f64>) -> Vec<Point2<f64>> {
    e.sample(EDGE_SAMPLES)
}

/// Closed outline of each triangle, for the fill layer. Edges come in
/// threes (ellipse arc, hyperbola arc, segment) per triangle.
fn triangle_outlines(edges: &[Edge<f64>]) -> Vec<Vec<Point2<f64>>> {
    edges
        .chunks(3)
        .filter(|t| t.len() == 3)
        .map(|t| {
            let mut ring: Vec<Point2<f64>> = Vec::new();
            for e in t {
                let mut pts = edge_points(e);
                if let Some(&last) = ring.last() {
                    let (head, tail) = (pts[0], pts[pts.len() - 1]);
                    if tail.distance(last) < head.distance(last) {
                        pts.reverse();
                    }
                } else if t[1].endpoint_distance(pts[0])
                    < t[1].endpoint_distance(pts[pts.len() - 1])
                {
                    pts.reverse();
                }
                ring.extend(pts);
            }
            ring
        })
        .collect()
}

fn body_window(edges: &[Edge<f64>], pair: &Pair) -> Window {
    let pts = edges
        .iter()
        .flat_map(edge_points)
        .chain([pair.f1(), pair.f2()]);
    Window::around(pts).padded(0.08)
}

fn draw_trajectory(canvas: &mut Canvas, traj: &Trajectory, reach: f64) {
    let mut pts = vec![traj.origin];
    pts.extend(traj.reflections.iter().map(|r| r.point));
    pts.push(traj.last_point() + traj.final_direction * reach);
    canvas.path("trajectory", &pts, false, "");
    for r in &traj.reflections {
        canvas.dot("point", r.point, 2.5);
    }
}

fn draw_foci(canvas: &mut Canvas, pair: &Pair) {
    for (name, f) in [("F1", pair.f1()), ("F2", pair.f2())] {
        canvas.dot("focus", f, 3.5);
        canvas.label(name, f, 5.0, 16.0);
    }
}

/// The confocal ellipse and hyperbola branch, their foci and the focal
/// line from `F1` through `H`.
pub fn conics_figure(pair: &Pair, width: f64) -> String {
    let (a, b, alpha, beta) = (pair.a(), pair.b(), pair.alpha(), pair.beta());
    let window = Window {
        min: Point2::new(-1.15 * a, -1.3 * b),
        max: Point2::new(1.6 * a, 1.3 * b),
    };
    let mut canvas = Canvas::new(window, width);
    let ellipse: Vec<Point2<f64>> = (0..=360)
        .map(|k| {
            let t = k as f64 * std::f64::consts::TAU / 360.0;
            Point2::new(a * t.cos(), b * t.sin())
        })
        .collect();
    canvas.path("conic", &ellipse, true, "");
    // right branch, clipped to the window height
    let t_max = (window.max.y / beta).asinh();
    let branch: Vec<Point2<f64>> = (0..=200)
        .map(|k| {
            let t = -t_max + 2.0 * t_max * k as f64 / 200.0;
            Point2::new(alpha * t.cosh(), beta * t.sinh())
        })
        .collect();
    canvas.path("conic", &branch, false, "");
    let h = Point2::new(pair.c(), b * b / a);
    let dir = (h - pair.f1()).normalized().unwrap_or(Vec2::new(1.0, 0.0));
    let end = pair.f1() + dir * window.diagonal();
    canvas.path("dashed", &[pair.f1(), end], false, "");
    draw_foci(&mut canvas, pair);
    canvas.label("H", h, 5.0, -6.0);
    canvas.finish()
}

/// The inner body with one trajectory through it.
pub fn inner_figure(body: &Body, traj: &Trajectory, width: f64) -> String {
    let inner = body.inner_body();
    let window = body_window(inner.edges(), &body.pair);
    let mut canvas = Canvas::new(window, width);
    for outline in triangle_outlines(inner.edges()) {
        canvas.path("body", &outline, true, "");
    }
    for e in inner.edges() {
        canvas.path(
            "edge",
            &edge_points(e),
            false,
            &format!(r#" data-edge="{}""#, e.id.0),
        );
    }
    draw_trajectory(&mut canvas, traj, window.diagonal());
    draw_foci(&mut canvas, &body.pair);
    canvas.finish()
}

/// The composite body with a trajectory whose first four reflections are
/// labelled C, D, E, G.
pub fn body_figure(edges: &[Edge<f64>], pair: &Pair, traj: &Trajectory, width: f64) -> String {
    let window = body_window(edges, pair);
    let mut canvas = Canvas::new(window, width);
    for outline in triangle_outlines(edges) {
        canvas.path("body", &outline, true, "");
    }
    for e in edges {
        canvas.path(
            "edge",
            &edge_points(e),
            false,
            &format!(r#" data-edge="{}""#, e.id.0),
        );
    }
    draw_trajectory(&mut canvas, traj, window.diagonal());
    for (r, name) in traj.reflections.iter().zip(["C", "D", "E", "G"]) {
        canvas.label(name, r.point, 5.0, -6.0);
    }
    draw_foci(&mut canvas, pair);
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_axis_points_up() {
        let w = Window {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(2.0, 1.0),
        };
        let c = Canvas::new(w, 200.0);
        assert_eq!(c.px(Point2::new(0.0, 1.0)), (0.0, 0.0));
        assert_eq!(c.px(Point2::new(2.0, 0.0)), (200.0, 100.0));
    }

    #[test]
    fn padding_is_uniform() {
        let w = Window {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(4.0, 1.0),
        }
        .padded(0.25);
        assert_eq!(w.min, Point2::new(-1.0, -1.0));
        assert_eq!(w.max, Point2::new(5.0, 2.0));
    }
}
