//! Exact geometry of convex polygons, boxes and disks.

mod hausdorff;
mod parallel;
mod point;
mod polygon;
pub mod simplex;
mod summary;

use std::f64::consts::PI;

pub use hausdorff::{hausdorff_distance, rigid_align, Alignment};
pub use parallel::inner_parallel;
pub use point::{convex_hull, point_segment_distance, Point};
pub use polygon::{ConvexPolygon, CONVEXITY_TOL, POLYGON_FILE_MAGIC, SEPARATION_TOL};
pub use summary::{
    box_summary, disk_summary, inscribed_disk, outer_parallel_summary, polygon_summary, BoxDomain, DiskDomain,
    GeometrySummary,
};

use crate::error::{Error, Result};

/// Any single convex domain the crate can measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Polygon(ConvexPolygon),
    Box(BoxDomain),
    Disk(DiskDomain),
}

impl Domain {
    pub fn summary(&self) -> Result<GeometrySummary> {
        geometry_summary(self)
    }
}

pub fn geometry_summary(domain: &Domain) -> Result<GeometrySummary> {
    match domain {
        Domain::Polygon(p) => polygon_summary(p),
        Domain::Box(b) => Ok(box_summary(b)),
        Domain::Disk(d) => Ok(disk_summary(d)),
    }
}

/// Regular `m`-gon centred at the origin with a vertex at angle 0.
pub fn regular_mgon(m: usize, area: f64) -> Result<ConvexPolygon> {
    if m < 3 {
        return Err(Error::invalid(format!("regular polygon needs m >= 3, got {m}")));
    }
    if !(area > 0.0) {
        return Err(Error::invalid("area must be positive"));
    }
    let mf = m as f64;
    let circumradius = (2.0 * area / (mf * (2.0 * PI / mf).sin())).sqrt();
    let v = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / mf;
            Point::new(circumradius * t.cos(), circumradius * t.sin())
        })
        .collect();
    ConvexPolygon::new(v)
}

/// Perimeter of the regular `m`-gon of the given area, `2 sqrt(m tan(pi/m) area)`.
pub fn regular_mgon_perimeter(m: usize, area: f64) -> f64 {
    let mf = m as f64;
    2.0 * (mf * (PI / mf).tan() * area).sqrt()
}
