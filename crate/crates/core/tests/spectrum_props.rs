use std::f64::consts::PI;

use proptest::prelude::*;
use shapelab_core::fem::{fem_spectrum, mesh_lowest, triangulate_level};
use shapelab_core::riesz::{counting_function, riesz_mean, RieszQuery};
use shapelab_core::spectrum::{box_spectrum, disk_spectrum, scale_spectrum, union_spectrum};
use shapelab_core::{BoxDomain, ConvexPolygon, DiskDomain, Point, Spectrum};

fn square_count_oracle(lambda: f64) -> usize {
    let mut n = 0;
    for j in 1..200u32 {
        for k in 1..200u32 {
            if PI * PI * f64::from(j * j + k * k) < lambda {
                n += 1;
            }
        }
    }
    n
}

fn exact_spectrum() -> impl Strategy<Value = Spectrum> {
    prop_oneof![
        (0.3f64..3.0, 0.3f64..3.0)
            .prop_map(|(a, b)| box_spectrum(&BoxDomain::new(vec![a, b]).unwrap(), 600.0).unwrap()),
        (0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0).prop_map(|(a, b, c)| box_spectrum(
            &BoxDomain::new(vec![a, b, c]).unwrap(),
            400.0
        )
        .unwrap()),
        (0.4f64..2.0).prop_map(|r| disk_spectrum(&DiskDomain::new(r).unwrap(), 600.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn square_count_matches_double_loop(lambda in 1.0f64..1e4) {
        let s = box_spectrum(&BoxDomain::new(vec![1.0, 1.0]).unwrap(), lambda).unwrap();
        prop_assert_eq!(s.len(), square_count_oracle(lambda));
    }

    #[test]
    fn union_counts_add(s1 in exact_spectrum(), s2 in exact_spectrum(), frac in 0.0f64..1.0) {
        let u = union_spectrum(&[s1.clone(), s2.clone()]).unwrap();
        let lambda = frac * u.complete_below();
        prop_assert_eq!(u.count_below(lambda), s1.count_below(lambda) + s2.count_below(lambda));
    }

    #[test]
    fn riesz_is_additive_over_unions(s1 in exact_spectrum(), s2 in exact_spectrum(), frac in 0.0f64..1.0, g in 0.0f64..3.0) {
        let u = union_spectrum(&[s1.clone(), s2.clone()]).unwrap();
        let q = RieszQuery::new(frac * u.complete_below(), g).unwrap();
        let whole = riesz_mean(&u, q).unwrap().value;
        let parts = riesz_mean(&s1, q).unwrap().value + riesz_mean(&s2, q).unwrap().value;
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0));
    }

    #[test]
    fn scaling_round_trips(s in exact_spectrum(), t in 0.1f64..10.0) {
        let back = scale_spectrum(&scale_spectrum(&s, t).unwrap(), 1.0 / t).unwrap();
        for (a, b) in back.eigenvalues().iter().zip(s.eigenvalues()) {
            prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
        }
        prop_assert!((back.complete_below() - s.complete_below()).abs() <= 4.0 * f64::EPSILON * s.complete_below());
    }

    #[test]
    fn riesz_nondecreasing_and_continuous(s in exact_spectrum(), g in 1.0f64..3.0) {
        let top = s.complete_below();
        let mut prev = 0.0;
        for i in 0..=400 {
            let lambda = top * i as f64 / 400.0;
            let v = riesz_mean(&s, RieszQuery::new(lambda, g).unwrap()).unwrap().value;
            prop_assert!(v >= prev);
            // Lipschitz on a grid: the jump is bounded by N(top) g (top)^(g-1) dLambda
            let n = s.count_below(top) as f64;
            prop_assert!(v - prev <= n * g * top.powf(g - 1.0) * top / 400.0 * (1.0 + 1e-9) + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn counting_matches_brute_force(s in exact_spectrum(), fracs in prop::collection::vec(0.0f64..1.0, 1000)) {
        for f in fracs {
            let lambda = f * s.complete_below();
            let direct = s.eigenvalues().iter().filter(|&&l| l < lambda).count() as f64;
            prop_assert_eq!(counting_function(&s, lambda).unwrap().value, direct);
            prop_assert_eq!(riesz_mean(&s, RieszQuery::new(lambda, 0.0).unwrap()).unwrap().value, direct);
        }
    }
}

#[test]
fn disk_weyl_leading_order() {
    let s = disk_spectrum(&DiskDomain::with_area(1.0).unwrap(), 1e4).unwrap();
    let ratio = s.len() as f64 * 4.0 * PI / 1e4;
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
}

fn fem_ground(p: &ConvexPolygon, level: usize) -> f64 {
    mesh_lowest(&triangulate_level(p, level), 1, 10.0).unwrap()[0].value
}

#[test]
fn fem_square_converges_at_second_order_from_above() {
    let sq = ConvexPolygon::unit_square();
    let exact = 2.0 * PI * PI;
    let errs: Vec<f64> = (2..=6).map(|l| fem_ground(&sq, l) - exact).collect();
    assert!(errs.iter().all(|&e| e > 0.0), "{errs:?}");
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!((3.5..=4.5).contains(&r), "{errs:?}");
    }
    // all low modes lie above the exact values at every level
    let exact_low = box_spectrum(&BoxDomain::new(vec![1.0, 1.0]).unwrap(), 200.0).unwrap();
    for level in 2..=5 {
        let m = mesh_lowest(&triangulate_level(&sq, level), exact_low.len(), 10.0).unwrap();
        for (d, e) in m.iter().zip(exact_low.eigenvalues()) {
            assert!(d.value >= *e, "level {level}: {} < {e}", d.value);
        }
    }
}

#[test]
fn fem_domain_monotonicity_and_scaling() {
    let outer = ConvexPolygon::rectangle(2.0, 2.0).unwrap();
    // a tilted square of side 1.2 about the centre of the 2 x 2 square
    let c = Point::new(1.0, 1.0);
    let inner = ConvexPolygon::new(
        [(-0.6, -0.6), (0.6, -0.6), (0.6, 0.6), (-0.6, 0.6)]
            .iter()
            .map(|&(x, y)| {
                let v = Point::new(x, y).rotate(0.3);
                Point::new(c.x + v.x, c.y + v.y)
            })
            .collect(),
    )
    .unwrap();
    assert!(inner.vertices().iter().all(|&v| outer.contains(v)));
    for level in 3..=5 {
        assert!(fem_ground(&inner, level) >= fem_ground(&outer, level));
    }

    let p = ConvexPolygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(1.2, 0.1),
        Point::new(1.0, 0.9),
        Point::new(0.2, 0.8),
    ])
    .unwrap();
    let t = 1.7;
    let a = fem_spectrum(&p, 120.0, 0.005).unwrap();
    let b = fem_spectrum(&p.scale(t), 120.0 / (t * t), 0.005).unwrap();
    let n = a.count_below(a.complete_below()).min(b.count_below(b.complete_below()));
    assert!(n >= 3);
    for k in 0..n {
        let (x, y) = (a.eigenvalues()[k], t * t * b.eigenvalues()[k]);
        let tol = a.error_bounds()[k] + t * t * b.error_bounds()[k] + 1e-9 * x;
        assert!((x - y).abs() <= tol, "k={k}: {x} vs {y} (tol {tol})");
    }
}
