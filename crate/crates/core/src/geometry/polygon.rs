use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::point::{point_segment_distance, Point};
use crate::error::{Error, Result};

/// Relative tolerance (times diameter squared) below which a turn is collinear.
pub const CONVEXITY_TOL: f64 = 1e-12;
/// Relative tolerance (times diameter) for consecutive vertex separation.
pub const SEPARATION_TOL: f64 = 1e-12;

pub const POLYGON_FILE_MAGIC: &str = "# shapelab-polygon v1";

/// A bounded, strictly convex planar polygon with counterclockwise vertices.
///
/// Construction validates the vertex list: at least three vertices, no
/// repeated consecutive vertices, and a strictly positive turn at every
/// vertex. Turns smaller than `1e-12 * D^2` are treated as collinear and the
/// middle vertex is dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

fn max_pairwise(v: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(v[i].dist(v[j]));
        }
    }
    d
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex coordinate".into()));
        }
        let diam = max_pairwise(&vertices);
        if diam == 0.0 {
            return Err(Error::InvalidPolygon("all vertices coincide".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].dist(vertices[(i + 1) % n]) <= SEPARATION_TOL * diam {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {} and {} coincide",
                    i,
                    (i + 1) % n
                )));
            }
        }
        if signed_area(&vertices) < 0.0 {
            return Err(Error::InvalidPolygon("vertices are in clockwise order".into()));
        }

        let tol = CONVEXITY_TOL * diam * diam;
        let mut v = vertices;
        loop {
            let n = v.len();
            if n < 3 {
                return Err(Error::InvalidPolygon("fewer than 3 non-collinear vertices".into()));
            }
            let mut drop = None;
            for i in 0..n {
                let prev = v[(i + n - 1) % n];
                let next = v[(i + 1) % n];
                let turn = (v[i] - prev).cross(next - v[i]);
                if turn < -tol {
                    return Err(Error::InvalidPolygon(format!(
                        "reflex or clockwise turn at vertex {i} (cross product {turn:e})"
                    )));
                }
                if turn <= tol {
                    drop = Some(i);
                    break;
                }
            }
            match drop {
                Some(i) => {
                    v.remove(i);
                }
                None => break,
            }
        }

        // All turns positive but the boundary could still wind more than once.
        let n = v.len();
        let winding: f64 = (0..n)
            .map(|i| {
                let a = v[(i + 1) % n] - v[i];
                let b = v[(i + 2) % n] - v[(i + 1) % n];
                a.cross(b).atan2(a.dot(b))
            })
            .sum();
        if (winding - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidPolygon(format!(
                "boundary winds {:.3} turns",
                winding / (2.0 * PI)
            )));
        }
        Ok(Self { vertices: v })
    }

    /// Builds a polygon from vertices in either orientation, reversing
    /// clockwise input.
    pub fn new_reoriented(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() >= 3 && signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    /// Axis-aligned rectangle `[0, a] x [0, b]`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::invalid("rectangle sides must be positive"));
        }
        Self::new(vec![
            Point::new(0.0, 0.0),
            Point::new(a, 0.0),
            Point::new(a, b),
            Point::new(0.0, b),
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(1.0, 1.0).expect("unit square is valid")
    }

    #[inline]
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Edges as `(start, end)` pairs in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn diameter(&self) -> f64 {
        max_pairwise(&self.vertices)
    }

    /// Minimal width: over all edges, the largest vertex distance to the
    /// edge's supporting line; the minimum over edges is attained by some edge
    /// for a convex polygon.
    pub fn width(&self) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let d = b - a;
                let len = d.norm();
                self.vertices.iter().map(|&p| d.cross(p - a) / len).fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for (p, q) in self.edges() {
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// Outward unit normals `n_i` and offsets `b_i` so that the polygon is
    /// `{x : n_i . x <= b_i for all i}`.
    pub fn half_planes(&self) -> Vec<(Point, f64)> {
        self.edges()
            .map(|(a, b)| {
                let d = b - a;
                let len = d.norm();
                let n = Point::new(d.y / len, -d.x / len);
                (n, n.dot(a))
            })
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.edges().all(|(a, b)| (b - a).cross(p - a) >= 0.0)
    }

    /// Euclidean distance from `p` to the closed polygon (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the boundary, for points inside or outside.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn translate(&self, by: Point) -> Self {
        self.map(|p| p + by)
    }

    /// Rotation about the origin.
    pub fn rotate(&self, angle: f64) -> Self {
        self.map(|p| p.rotate(angle))
    }

    /// Homothety about the origin.
    pub fn scale(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        self.map(|p| p * factor)
    }

    /// Mirror image in the vertical axis through the origin (orientation is
    /// restored by reversing the vertex order).
    pub fn reflect(&self) -> Self {
        let mut v: Vec<Point> = self.vertices.iter().map(|p| Point::new(-p.x, p.y)).collect();
        v.reverse();
        Self { vertices: v }
    }

    /// Rescaled about the centroid to have the given area.
    pub fn with_area(&self, area: f64) -> Self {
        let c = self.centroid();
        let s = (area / self.area()).sqrt();
        self.map(|p| c + (p - c) * s)
    }

    /// Translated so that the centroid is at the origin.
    pub fn centered(&self) -> Self {
        let c = self.centroid();
        self.translate(-c)
    }

    /// Serializes to the `shapelab-polygon v1` text format.
    pub fn to_file_string(&self) -> String {
        let mut s = String::from(POLYGON_FILE_MAGIC);
        s.push('\n');
        for p in &self.vertices {
            let _ = writeln!(s, "{:.17e} {:.17e}", p.x, p.y);
        }
        s
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_file_string().as_bytes())?;
        Ok(())
    }

    /// Parses the `shapelab-polygon v1` format. Clockwise input is rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == POLYGON_FILE_MAGIC => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header `{POLYGON_FILE_MAGIC}`"),
                })
            }
        }
        let mut pts = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: "expected two coordinates".into(),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })
            };
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "trailing tokens after `x y`".into(),
                });
            }
            pts.push(Point::new(x, y));
        }
        if pts.len() >= 3 && signed_area(&pts) < 0.0 {
            return Err(Error::InvalidPolygon(
                "clockwise vertex order in polygon file; reverse it explicitly".into(),
            ));
        }
        Self::new(pts)
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::parse(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolygon {
        ConvexPolygon::unit_square()
    }

    #[test]
    fn rejects_too_few_vertices() {
        let err = ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn rejects_clockwise_and_reflex() {
        let mut v = square().vertices().to_vec();
        v.reverse();
        assert!(ConvexPolygon::new(v.clone()).is_err());
        assert_eq!(ConvexPolygon::new_reoriented(v).unwrap().area(), 1.0);

        let dart = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(0.5, 1.0),
        ];
        assert!(ConvexPolygon::new(dart).is_err());
    }

    #[test]
    fn rejects_repeated_vertex() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(ConvexPolygon::new(v).is_err());
    }

    #[test]
    fn drops_collinear_vertex() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let p = ConvexPolygon::new(v).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn rejects_doubly_wound_star() {
        let v: Vec<Point> = (0..5)
            .map(|k| {
                let t = 4.0 * PI * k as f64 / 5.0;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        assert!(ConvexPolygon::new(v).is_err());
    }

    #[test]
    fn square_measures() {
        let p = square();
        assert_eq!(p.area(), 1.0);
        assert_eq!(p.perimeter(), 4.0);
        assert_eq!(p.width(), 1.0);
        assert!((p.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.centroid(), Point::new(0.5, 0.5));
        assert!(p.contains(Point::new(0.2, 0.9)));
        assert_eq!(p.distance_to(Point::new(2.0, 0.5)), 1.0);
    }

    #[test]
    fn with_area_preserves_centroid() {
        let p = ConvexPolygon::rectangle(2.0, 3.0).unwrap().with_area(1.0);
        assert!((p.area() - 1.0).abs() < 1e-14);
        let c = p.centroid();
        assert!((c.x - 1.0).abs() < 1e-14 && (c.y - 1.5).abs() < 1e-14);
    }

    #[test]
    fn file_round_trip_and_cw_rejection() {
        let p = ConvexPolygon::rectangle(2.0, 0.5).unwrap();
        let q = ConvexPolygon::parse(&p.to_file_string()).unwrap();
        assert_eq!(p, q);

        let cw = "# shapelab-polygon v1\n0 0\n0 1\n1 1\n1 0\n";
        let err = ConvexPolygon::parse(cw).unwrap_err();
        assert!(err.to_string().contains("clockwise"));

        assert!(ConvexPolygon::parse("0 0\n1 0\n0 1\n").is_err());
        assert!(ConvexPolygon::parse("# shapelab-polygon v1\n0 0\n1 x\n0 1\n").is_err());
    }
}
