use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};
use crate::io::fmt_f64;

/// Meshes whose smallest interior angle falls below this carry a quality
/// warning.
pub const MIN_ANGLE_WARNING_DEG: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct TriangleMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    level: usize,
    min_angle_deg: f64,
}

impl TriangleMesh {
    /// Fan triangulation of `p` from its centroid (refinement level 0).
    pub fn fan(p: &ConvexPolygon) -> Self {
        let mut nodes = vec![p.centroid()];
        nodes.extend_from_slice(p.vertices());
        let m = p.len();
        let triangles = (0..m).map(|i| [0, 1 + i, 1 + (i + 1) % m]).collect();
        let mut boundary = vec![true; m + 1];
        boundary[0] = false;
        Self::from_parts(nodes, triangles, boundary, 0)
    }

    fn from_parts(nodes: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>, level: usize) -> Self {
        let mut min_angle = f64::INFINITY;
        for t in &triangles {
            for k in 0..3 {
                let a = nodes[t[k]];
                let u = nodes[t[(k + 1) % 3]] - a;
                let v = nodes[t[(k + 2) % 3]] - a;
                min_angle = min_angle.min(u.cross(v).atan2(u.dot(v)).abs());
            }
        }
        Self {
            nodes,
            triangles,
            boundary,
            level,
            min_angle_deg: min_angle.to_degrees(),
        }
    }

    /// Uniform 4-way refinement: every triangle is split at its edge
    /// midpoints. Midpoints of boundary edges are boundary nodes.
    pub fn refine(&self) -> Self {
        let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *edge_use.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(edge_use.len());
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let key = edge_key(t[k], t[(k + 1) % 3]);
                m[k] = *mid.entry(key).or_insert_with(|| {
                    nodes.push(nodes[key.0].lerp(nodes[key.1], 0.5));
                    boundary.push(edge_use[&key] == 1);
                    nodes.len() - 1
                });
            }
            // m[k] is the midpoint of edge (t[k], t[k+1])
            triangles.push([t[0], m[0], m[2]]);
            triangles.push([m[0], t[1], m[1]]);
            triangles.push([m[2], m[1], t[2]]);
            triangles.push([m[0], m[1], m[2]]);
        }
        Self::from_parts(nodes, triangles, boundary, self.level + 1)
    }

    #[cfg(test)]
    pub(crate) fn with_boundary_flags(mut self, flags: Vec<bool>) -> Self {
        self.boundary = flags;
        self
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    /// Number of uniform refinements applied to the fan mesh.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn min_angle_deg(&self) -> f64 {
        self.min_angle_deg
    }

    pub fn quality_warning(&self) -> bool {
        self.min_angle_deg < MIN_ANGLE_WARNING_DEG
    }

    pub fn interior_count(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    /// Longest triangle edge.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| self.nodes[a].dist(self.nodes[b]))
            .fold(0.0, f64::max)
    }

    /// Node and triangle dump: `kind,index,c1,c2,c3` where nodes carry
    /// `x,y,boundary` and triangles their three node indices.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,index,c1,c2,c3\n");
        for (i, (p, b)) in self.nodes.iter().zip(&self.boundary).enumerate() {
            let _ = writeln!(s, "node,{i},{},{},{}", fmt_f64(p.x), fmt_f64(p.y), u8::from(*b));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            let _ = writeln!(s, "triangle,{i},{},{},{}", t[0], t[1], t[2]);
        }
        s
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Fan mesh refined until the longest edge is at most `h`.
pub fn triangulate(p: &ConvexPolygon, h: f64) -> Result<TriangleMesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("mesh size must be positive"));
    }
    let fan = TriangleMesh::fan(p);
    let levels = levels_for(fan.max_edge(), h);
    Ok(triangulate_level(p, levels))
}

/// Fan mesh refined exactly `level` times.
pub fn triangulate_level(p: &ConvexPolygon, level: usize) -> TriangleMesh {
    let mut mesh = TriangleMesh::fan(p);
    for _ in 0..level {
        mesh = mesh.refine();
    }
    mesh
}

/// Smallest number of halvings taking `edge` to at most `h`.
pub(crate) fn levels_for(edge: f64, h: f64) -> usize {
    let mut k = 0;
    let mut e = edge;
    while e > h * (1.0 + 1e-12) {
        e *= 0.5;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::regular_mgon;

    #[test]
    fn square_counts() {
        let sq = ConvexPolygon::unit_square();
        assert_eq!(triangulate(&sq, 0.5).unwrap().triangles().len(), 16);
        assert_eq!(triangulate(&sq, 0.25).unwrap().triangles().len(), 64);
        assert_eq!(triangulate(&sq, 2.0).unwrap().triangles().len(), 4);
        assert!(triangulate(&sq, 0.0).is_err());
    }

    #[test]
    fn hexagon_count_matches_direct_construction() {
        let hex = regular_mgon(6, 1.0).unwrap();
        let mesh = triangulate(&hex, 0.1).unwrap();
        // fan edges all equal the circumradius; each level halves them
        let mut k = 0;
        let mut e = hex.vertices()[0].norm();
        while e > 0.1 {
            e /= 2.0;
            k += 1;
        }
        assert_eq!(mesh.triangles().len(), 6 * 4usize.pow(k));
        assert!(mesh.max_edge() <= 0.1);
    }

    #[test]
    fn euler_characteristic_and_area() {
        let p = regular_mgon(5, 2.0).unwrap();
        for level in 0..4 {
            let mesh = triangulate_level(&p, level);
            let nb = mesh.boundary_flags().iter().filter(|b| **b).count();
            // disk topology: V - E + F = 1, and boundary edges = boundary nodes
            let f = mesh.triangles().len();
            let e = (3 * f + nb) / 2;
            assert_eq!(mesh.nodes().len() + f - e, 1);
            assert_eq!(nb, 5 << level);
            let area: f64 = mesh
                .triangles()
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| mesh.nodes()[i]);
                    0.5 * (b - a).cross(c - a)
                })
                .sum();
            assert!((area - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_and_boundary_placement() {
        let p = ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(1.0, 2.0)]).unwrap();
        let mesh = triangulate_level(&p, 3);
        for t in mesh.triangles() {
            let [a, b, c] = t.map(|i| mesh.nodes()[i]);
            assert!((b - a).cross(c - a) > 0.0);
        }
        for (q, b) in mesh.nodes().iter().zip(mesh.boundary_flags()) {
            let d = p.boundary_distance(*q);
            if *b {
                assert!(d < 1e-10 * p.diameter());
            } else {
                assert!(d > 1e-6);
            }
        }
        assert!(!mesh.quality_warning());
        // refinement keeps the fan angles
        let fan = TriangleMesh::fan(&p);
        assert!((mesh.min_angle_deg() - fan.min_angle_deg()).abs() < 1e-9);
    }

    #[test]
    fn needle_polygon_warns() {
        let p = ConvexPolygon::rectangle(1000.0, 0.001).unwrap();
        assert!(TriangleMesh::fan(&p).quality_warning());
    }

    #[test]
    fn csv_dump() {
        let mesh = triangulate_level(&ConvexPolygon::unit_square(), 0);
        let csv = mesh.to_csv();
        assert_eq!(csv.lines().count(), 1 + 5 + 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("node,0,5.0"));
    }
}
