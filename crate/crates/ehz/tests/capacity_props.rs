mod common;

use common::{centered, polygon, triangle};
use ehz::capacity::{
    capacity_three_bounce_oracle, capacity_two_bounce, ehz_capacity, ell_length, is_trapezoid,
    systolic_report, three_bounce_value, worm_inequality_check, CapacityError, Solver,
};
use ehz::equality_cases::{diamond, square, t_star, unit_square};
use ehz::geom2d::{
    fits_by_translation, regular_polygon, rotate_j, ClosedPolygonalCurve, ConvexPolygon, Vec2,
};
use proptest::prelude::*;

fn poly(c: &[[f64; 2]]) -> ConvexPolygon {
    ConvexPolygon::from_coords(c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn capacity_is_symmetric(k in polygon(6, 0.1), t in polygon(6, 0.1)) {
        let a = ehz_capacity(&k, &t).unwrap();
        let b = ehz_capacity(&t, &k).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-3 * a.value);
        prop_assert!((a.value - a.dual_value).abs() <= 1e-3 * a.value);
        prop_assert!(!fits_by_translation(&a.optimizer_curve, &k).fits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn capacity_scales_linearly(k in polygon(6, 0.1), t in polygon(6, 0.1)) {
        let c = ehz_capacity(&k, &t).unwrap().value;
        for lam in [0.5, 2.0] {
            let ck = ehz_capacity(&k.scale(lam), &t).unwrap().value;
            let ct = ehz_capacity(&k, &t.scale(lam)).unwrap().value;
            prop_assert!((ck - lam * c).abs() <= 1e-3 * lam * c);
            prop_assert!((ct - lam * c).abs() <= 1e-3 * lam * c);
        }
    }

    #[test]
    fn capacity_is_monotone_in_t(k in polygon(6, 0.1), t in polygon(6, 0.1), shrink in 0.3f64..0.95) {
        let g = t.centroid();
        let inner = t.translate(&(-g)).scale(shrink).translate(&g);
        let small = ehz_capacity(&k, &inner).unwrap().value;
        let big = ehz_capacity(&k, &t).unwrap().value;
        prop_assert!(small <= big + 1e-9);
    }

    #[test]
    fn finer_grid_never_worse(k in polygon(6, 0.1), t in polygon(6, 0.1)) {
        let (coarse, _) = three_bounce_value(&k, &t, 360).unwrap();
        let (fine, curve) = three_bounce_value(&k, &t, 1440).unwrap();
        prop_assert!(fine <= coarse + 1e-9, "{} > {}", fine, coarse);
        prop_assert!(!fits_by_translation(&curve, &k).fits);
    }

    #[test]
    fn triangle_products(d in triangle(0.05)) {
        let jd = rotate_j(&d);
        let two = capacity_two_bounce(&d, &jd).unwrap().value;
        prop_assert!((two - 2.0 * d.area()).abs() <= 1e-9 * d.area());
        let c = ehz_capacity(&d, &jd).unwrap();
        prop_assert!((c.value - d.area()).abs() <= 1e-3 * d.area());
        prop_assert_eq!(c.solver, Solver::ThreeBounceOracle);
    }

    #[test]
    fn ell_length_ignores_translations(
        pts in prop::collection::vec(common::point(1.0), 3),
        t in polygon(6, 0.1),
        a in common::point(5.0),
        b in common::point(5.0),
    ) {
        let q = ClosedPolygonalCurve::new(pts);
        prop_assume!(q.is_ok());
        let q = q.unwrap();
        let base = ell_length(&q, &t);
        prop_assert!((ell_length(&q.translate(&a), &t.translate(&b)) - base).abs() <= 1e-12 * base.max(1.0));
    }
}

#[test]
fn two_bounce_examples() {
    for a in [1.0, 2.0] {
        for (a1, a2) in [(0.0, 0.0), (0.5, 0.25), (1.0, 0.3), (0.7, 1.0)] {
            let c = capacity_two_bounce(&square(a), &diamond(a1, a2).unwrap()).unwrap();
            assert!((c.value - a).abs() <= 1e-9);
        }
    }
    let c = capacity_two_bounce(&unit_square(), &unit_square()).unwrap();
    assert!((c.value - 1.0).abs() <= 1e-12);
    assert_eq!(c.optimizer_curve.vertices().len(), 2);
}

#[test]
fn oracle_examples() {
    let d = poly(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    let c = ehz_capacity(&d, &rotate_j(&d)).unwrap();
    assert!((c.value - 0.5).abs() <= 5e-4);
    assert!(!fits_by_translation(&c.optimizer_curve, &d).fits);

    let tri = common::centered(&d);
    let v = rotate_j(&tri).neg().vertices()[1];
    let par = t_star(&tri, &v).unwrap().hull;
    let c = capacity_three_bounce_oracle(&tri, &par, 720).unwrap();
    assert!((c.value - 2.0 * tri.area()).abs() <= 1e-3 * 2.0 * tri.area());

    let c = capacity_three_bounce_oracle(&unit_square(), &diamond(0.5, 0.5).unwrap(), 720).unwrap();
    assert!(c.value >= 1.0 - 1e-9);
    assert_eq!(
        capacity_three_bounce_oracle(&unit_square(), &unit_square(), 30),
        Err(CapacityError::ResolutionTooSmall(30))
    );

    let big = poly(&[[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]);
    let c = ehz_capacity(&big, &diamond(0.5, 0.25).unwrap()).unwrap();
    assert!((c.value - 2.0).abs() <= 1e-9);
}

#[test]
fn systolic_examples() {
    let r = systolic_report(&unit_square(), &diamond(0.3, 0.8).unwrap()).unwrap();
    assert!((r.volume_product - 0.5).abs() < 1e-15);
    assert!((r.ratio - 1.0).abs() < 1e-9 && r.is_equality);

    let tri = centered(&poly(&[[-1.0, -0.5], [1.2, -0.3], [0.1, 0.9]]));
    let hex = t_star(&tri, &Vec2::new(0.02, -0.03)).unwrap().hull;
    let r = systolic_report(&tri, &hex).unwrap();
    assert!((r.volume_product - 2.0 * tri.area().powi(2)).abs() < 1e-12);
    assert!((r.ratio - 1.0).abs() < 2e-3);

    let disk = regular_polygon(64, 1.0);
    let disk = disk.scale((2.0 * tri.area() / disk.area()).sqrt());
    let r = systolic_report(&tri, &disk).unwrap();
    assert!(r.ratio < 1.0 && !r.is_equality);
}

#[test]
fn worm_examples() {
    assert!(worm_inequality_check(&unit_square(), &diamond(0.5, 0.5).unwrap()).unwrap());
    let t1 = poly(&[[0.0, 0.0], [1.0, 0.2], [0.3, 0.8]]);
    let t2 = poly(&[[-0.5, 0.0], [0.5, -0.1], [0.0, 0.6]]);
    assert!(worm_inequality_check(&t1, &t2).unwrap());
    assert!(worm_inequality_check(&t1.scale(2.0), &t2).unwrap());
    assert_eq!(
        worm_inequality_check(&t1, &regular_polygon(5, 1.0)),
        Err(CapacityError::QNotTrapezoid)
    );
    assert!(is_trapezoid(&diamond(0.5, 0.5).unwrap()));
    assert!(!is_trapezoid(&diamond(0.3, 0.6).unwrap()));
}
