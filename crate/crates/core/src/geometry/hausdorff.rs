use std::f64::consts::PI;

use super::polygon::ConvexPolygon;
use crate::numeric::golden_section_min;

/// Hausdorff distance between two convex polygons.
///
/// `dist(., q)` is convex, so its supremum over `p` is attained at a vertex
/// of `p`; likewise in the other direction.
pub fn hausdorff_distance(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let one_way =
        |a: &ConvexPolygon, b: &ConvexPolygon| a.vertices().iter().map(|&v| b.distance_to(v)).fold(0.0, f64::max);
    one_way(p, q).max(one_way(q, p))
}

/// Outcome of [`rigid_align`].
#[derive(Clone, Debug)]
pub struct Alignment {
    /// `p` moved by the optimal rigid motion.
    pub polygon: ConvexPolygon,
    pub distance: f64,
    /// Rotation applied about the common centroid (radians).
    pub angle: f64,
    /// Whether a reflection was applied before rotating.
    pub reflected: bool,
}

const GRID_STEPS: usize = 360;
const REFINE_CANDIDATES: usize = 4;

/// Aligns `p` to `reference` up to rigid motions: centroids are matched,
/// then the Hausdorff distance is minimized over rotations (1 degree grid
/// followed by golden-section refinement) with and without a reflection.
pub fn rigid_align(p: &ConvexPolygon, reference: &ConvexPolygon) -> Alignment {
    let target = reference.centered();
    let shift = reference.centroid();
    let base = p.centered();
    let step = 2.0 * PI / GRID_STEPS as f64;

    let mut best: Option<(f64, f64, bool)> = None;
    for reflected in [false, true] {
        let shape = if reflected { base.reflect() } else { base.clone() };
        let dist_at = |angle: f64| hausdorff_distance(&shape.rotate(angle), &target);
        let grid: Vec<f64> = (0..GRID_STEPS).map(|k| dist_at(k as f64 * step)).collect();

        // Refine around the lowest circular local minima of the grid.
        let mut minima: Vec<usize> = (0..GRID_STEPS)
            .filter(|&k| {
                let l = grid[(k + GRID_STEPS - 1) % GRID_STEPS];
                let r = grid[(k + 1) % GRID_STEPS];
                grid[k] <= l && grid[k] <= r
            })
            .collect();
        minima.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
        minima.truncate(REFINE_CANDIDATES);
        for k in minima {
            let centre = k as f64 * step;
            let (angle, d, _) = golden_section_min(&dist_at, centre - step, centre + step, 1e-12, 200);
            let (angle, d) = if grid[k] < d { (centre, grid[k]) } else { (angle, d) };
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, angle, reflected));
            }
        }
    }
    let (distance, angle, reflected) = best.expect("grid has at least one local minimum");
    let shape = if reflected { base.reflect() } else { base };
    Alignment {
        polygon: shape.rotate(angle).translate(shift),
        distance,
        angle: angle.rem_euclid(2.0 * PI),
        reflected,
    }
}
