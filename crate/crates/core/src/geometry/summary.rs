use std::f64::consts::PI;

use super::point::Point;
use super::polygon::ConvexPolygon;
use super::simplex;
use crate::error::{Error, Result};

/// Axis-aligned box `(0, a_1) x ... x (0, a_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    sides: Vec<f64>,
}

impl BoxDomain {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::invalid("box needs at least one side"));
        }
        if sides.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("box sides must be positive and finite"));
        }
        Ok(Self { sides })
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    /// Same shape with unit volume.
    pub fn normalized(&self) -> Self {
        let s = self.volume().powf(-1.0 / self.dim() as f64);
        Self {
            sides: self.sides.iter().map(|a| a * s).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskDomain {
    radius: f64,
}

impl DiskDomain {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("disk radius must be positive"));
        }
        Ok(Self { radius })
    }

    pub fn with_area(area: f64) -> Result<Self> {
        Self::new((area / PI).sqrt())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Measures and extremal radii of a convex domain. `area` is the
/// `dim`-dimensional measure and `perimeter` the boundary measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometrySummary {
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub width: f64,
    pub diameter: f64,
    pub dim: usize,
}

impl GeometrySummary {
    /// `area/perimeter <= inradius <= dim * area/perimeter` and
    /// `2 inradius <= width <= diameter`, with relative slack `tol`.
    pub fn satisfies_radius_bounds(&self, tol: f64) -> bool {
        let q = self.area / self.perimeter;
        let s = 1.0 + tol;
        q <= self.inradius * s
            && self.inradius <= self.dim as f64 * q * s
            && 2.0 * self.inradius <= self.width * s
            && self.width <= self.diameter * s
    }
}

/// Largest inscribed disk as `(radius, center)`, from the linear program
/// `max r  s.t.  n_i . x + r <= b_i`.
pub fn inscribed_disk(p: &ConvexPolygon) -> Result<(f64, Point)> {
    // Shift to the centroid so that every offset is positive and the origin
    // is a feasible vertex; x = x+ - x- handles the free center coordinates.
    let c = p.centroid();
    let hp = p.half_planes();
    let rows: Vec<Vec<f64>> = hp.iter().map(|(n, _)| vec![n.x, -n.x, n.y, -n.y, 1.0]).collect();
    let rhs: Vec<f64> = hp.iter().map(|(n, b)| (b - n.dot(c)).max(0.0)).collect();
    let sol = simplex::maximize(&[0.0, 0.0, 0.0, 0.0, 1.0], &rows, &rhs)?;
    let center = c + Point::new(sol.x[0] - sol.x[1], sol.x[2] - sol.x[3]);
    // Recompute the radius from the center to remove pivoting round-off.
    let r = hp.iter().map(|(n, b)| b - n.dot(center)).fold(f64::INFINITY, f64::min);
    Ok((r, center))
}

pub fn polygon_summary(p: &ConvexPolygon) -> Result<GeometrySummary> {
    let (inradius, _) = inscribed_disk(p)?;
    Ok(GeometrySummary {
        area: p.area(),
        perimeter: p.perimeter(),
        inradius,
        width: p.width(),
        diameter: p.diameter(),
        dim: 2,
    })
}

pub fn box_summary(b: &BoxDomain) -> GeometrySummary {
    let sides = b.sides();
    let vol = b.volume();
    let n = sides.len();
    // Each pair of opposite facets orthogonal to axis i has measure vol / a_i;
    // in one dimension the "boundary" is two points.
    let perimeter = if n == 1 {
        2.0
    } else {
        sides.iter().map(|a| 2.0 * vol / a).sum()
    };
    let min = sides.iter().copied().fold(f64::INFINITY, f64::min);
    GeometrySummary {
        area: vol,
        perimeter,
        inradius: 0.5 * min,
        width: min,
        diameter: sides.iter().map(|a| a * a).sum::<f64>().sqrt(),
        dim: n,
    }
}

pub fn disk_summary(d: &DiskDomain) -> GeometrySummary {
    let r = d.radius();
    GeometrySummary {
        area: PI * r * r,
        perimeter: 2.0 * PI * r,
        inradius: r,
        width: 2.0 * r,
        diameter: 2.0 * r,
        dim: 2,
    }
}

/// Area and perimeter of the outer parallel set `{x : dist(x, p) <= t}`
/// from the planar Steiner formula; extremal radii grow by `t` or `2t`.
pub fn outer_parallel_summary(p: &ConvexPolygon, t: f64) -> Result<GeometrySummary> {
    if !(t >= 0.0) {
        return Err(Error::invalid("parallel distance must be nonnegative"));
    }
    let g = polygon_summary(p)?;
    Ok(GeometrySummary {
        area: g.area + t * g.perimeter + PI * t * t,
        perimeter: g.perimeter + 2.0 * PI * t,
        inradius: g.inradius + t,
        width: g.width + 2.0 * t,
        diameter: g.diameter + 2.0 * t,
        dim: 2,
    })
}
