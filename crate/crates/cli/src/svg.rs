//! Static SVG output: domain outlines and x-y curves.

use std::fmt::Write as _;

use shapelab_core::geometry::Point;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

struct Frame {
    min: Point,
    scale_x: f64,
    scale_y: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Point>, square: bool) -> Self {
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let inner = SIZE - 2.0 * MARGIN;
        let (mut sx, mut sy) = (inner / span(lo.x, hi.x), inner / span(lo.y, hi.y));
        if square {
            sx = sx.min(sy);
            sy = sx;
        }
        Frame {
            min: lo,
            scale_x: sx,
            scale_y: sy,
        }
    }

    /// SVG coordinates, y pointing up.
    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale_x,
            SIZE - MARGIN - (p.y - self.min.y) * self.scale_y,
        )
    }
}

fn header(s: &mut String) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn points_attr(frame: &Frame, pts: &[Point]) -> String {
    pts.iter()
        .map(|&p| {
            let (x, y) = frame.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Outlines drawn with equal axis scaling; each entry is `(vertices, stroke colour)`.
pub fn polygons_svg(shapes: &[(Vec<Point>, &str)]) -> String {
    let frame = Frame::fit(shapes.iter().flat_map(|(v, _)| v.iter().copied()), true);
    let mut s = String::new();
    header(&mut s);
    for (v, colour) in shapes {
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            points_attr(&frame, v)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Line plot of `(x, y)` samples with the axis ranges printed in the corners.
pub fn curve_svg(xy: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let pts: Vec<Point> = xy.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let frame = Frame::fit(pts.iter().copied(), false);
    let mut s = String::new();
    header(&mut s);
    let (x0, y0) = (MARGIN, SIZE - MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="grey"/>"#,
        w = SIZE - 2.0 * MARGIN
    );
    if !pts.is_empty() {
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            points_attr(&frame, &pts)
        );
        let (xmin, xmax) = xy
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
        let (ymin, ymax) = xy
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
        let _ = writeln!(
            s,
            r#"<text x="{x0}" y="{}" font-size="10">{x_label}: {xmin:.6e} .. {xmax:.6e}</text>"#,
            y0 + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x0}" y="{}" font-size="10">{y_label}: {ymin:.6e} .. {ymax:.6e}</text>"#,
            MARGIN - 8.0
        );
    }
    s.push_str("</svg>\n");
    s
}
