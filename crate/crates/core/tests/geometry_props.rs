use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapelab_core::geometry::{
    convex_hull, hausdorff_distance, inner_parallel, outer_parallel_summary, polygon_summary, regular_mgon,
    regular_mgon_perimeter,
};
use shapelab_core::{ConvexPolygon, Point};

/// Convex hull of random points; `None` when degenerate.
fn hull_polygon(pts: &[(f64, f64)]) -> Option<ConvexPolygon> {
    let pts: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let hull = convex_hull(&pts);
    if hull.len() < 3 {
        return None;
    }
    ConvexPolygon::new(hull).ok().filter(|p| p.area() > 1e-3)
}

fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3..14).prop_filter_map("degenerate hull", |v| hull_polygon(&v))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inradius_and_width_bounds(p in polygon()) {
        let g = polygon_summary(&p).unwrap();
        let q = g.area / g.perimeter;
        prop_assert!(q <= g.inradius * (1.0 + 1e-9));
        prop_assert!(g.inradius <= 2.0 * q * (1.0 + 1e-9));
        prop_assert!(2.0 * g.inradius <= g.width * (1.0 + 1e-9));
        prop_assert!(g.width <= g.diameter * (1.0 + 1e-12));
    }

    #[test]
    fn inner_parallel_perimeter(p in polygon(), frac in 0.01f64..0.99) {
        let g = polygon_summary(&p).unwrap();
        let t = frac * g.inradius;
        if let Some(inner) = inner_parallel(&p, t).unwrap() {
            let per = inner.perimeter();
            prop_assert!(per <= g.perimeter * (1.0 + 1e-12));
            prop_assert!(per >= g.perimeter * (1.0 - t / g.inradius) * (1.0 - 1e-9));
        }
    }

    #[test]
    fn steiner_area(p in polygon(), t in 0.0f64..3.0) {
        let o = outer_parallel_summary(&p, t).unwrap();
        let direct = p.area() + t * p.perimeter() + PI * t * t;
        prop_assert!((o.area - direct).abs() <= 4.0 * f64::EPSILON * direct);
    }

    #[test]
    fn hausdorff_is_a_metric(a in polygon(), b in polygon(), c in polygon()) {
        let ab = hausdorff_distance(&a, &b);
        prop_assert_eq!(ab, hausdorff_distance(&b, &a));
        prop_assert_eq!(hausdorff_distance(&a, &a), 0.0);
        prop_assert!(ab <= hausdorff_distance(&a, &c) + hausdorff_distance(&c, &b) + 1e-12);
    }
}

#[test]
fn regular_perimeters_decrease_to_the_disk() {
    let per: Vec<f64> = (3..200).map(|m| regular_mgon(m, 1.0).unwrap().perimeter()).collect();
    assert!(per.windows(2).all(|w| w[1] < w[0]));
    let disk = 2.0 * PI.sqrt();
    assert!(per.iter().all(|&p| p > disk));
    assert!((regular_mgon_perimeter(100_000, 1.0) - disk) / disk < 1e-9);
}

#[test]
fn regular_polygon_has_least_perimeter() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 3..=8 {
        let best = regular_mgon(m, 1.0).unwrap().perimeter();
        let mut samples = 0;
        while samples < 10_000 {
            let pts: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let Some(p) = hull_polygon(&pts) else { continue };
            samples += 1;
            let p = p.with_area(1.0);
            assert!(p.perimeter() >= best * (1.0 - 1e-12), "m={m}: {:?}", p.vertices());
        }
    }
}
