use super::point::Point;
use super::polygon::ConvexPolygon;
use super::summary::inscribed_disk;
use crate::error::{Error, Result};

/// Clips a convex vertex loop to the half-plane `n . x <= b`.
fn clip(poly: &[Point], n: Point, b: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let k = poly.len();
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let dp = n.dot(p) - b;
        let dq = n.dot(q) - b;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            out.push(p.lerp(q, dp / (dp - dq)));
        }
    }
    out
}

/// Inner parallel set `{x in p : dist(x, complement) > t}`: the
/// intersection of the edge half-planes moved inward by `t`.
///
/// Returns `None` once `t` reaches the inradius. Edges that vanish in the
/// offset are dropped.
pub fn inner_parallel(p: &ConvexPolygon, t: f64) -> Result<Option<ConvexPolygon>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("parallel distance must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(Some(p.clone()));
    }
    let (r, _) = inscribed_disk(p)?;
    if t >= r {
        return Ok(None);
    }
    let mut loop_pts = p.vertices().to_vec();
    for (n, b) in p.half_planes() {
        loop_pts = clip(&loop_pts, n, b - t);
        if loop_pts.len() < 3 {
            return Ok(None);
        }
    }
    // Clipping leaves near-duplicate points where edges disappear.
    let scale = p.diameter();
    loop_pts.dedup_by(|a, b| a.dist(*b) <= 1e-11 * scale);
    while loop_pts.len() > 1 && loop_pts[0].dist(*loop_pts.last().unwrap()) <= 1e-11 * scale {
        loop_pts.pop();
    }
    match ConvexPolygon::new(loop_pts) {
        Ok(q) => Ok(Some(q)),
        // Within round-off of the inradius the set degenerates to a segment.
        Err(Error::InvalidPolygon(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_square() {
        let sq = ConvexPolygon::unit_square();
        let q = inner_parallel(&sq, 0.25).unwrap().unwrap();
        assert_eq!(q.len(), 4);
        assert!((q.area() - 0.25).abs() < 1e-14);
        assert!((q.perimeter() - 2.0).abs() < 1e-14);
        // equality in |d Omega_t| >= |d Omega| (1 - t/r)
        assert!((q.perimeter() - 4.0 * (1.0 - 0.25 / 0.5)).abs() < 1e-14);
        assert!(inner_parallel(&sq, 0.6).unwrap().is_none());
        assert!(inner_parallel(&sq, 0.5).unwrap().is_none());
        assert!(inner_parallel(&sq, -0.1).is_err());
    }

    #[test]
    fn short_edges_vanish() {
        // A square with one corner cut by a tiny edge loses that edge.
        let p = ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.95),
            Point::new(0.95, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let q = inner_parallel(&p, 0.2).unwrap().unwrap();
        assert_eq!(q.len(), 4);
    }
}
