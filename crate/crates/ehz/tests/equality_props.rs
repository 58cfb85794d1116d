mod common;

use common::{centered, triangle};
use ehz::equality_cases::{
    diamond, place_in_unit_square, printed_lambdas, quadrilateral_from_params, splitting_triangles,
    t_star, trapezoid_cover_triangle, QuadParams, TStarKind,
};
use ehz::geom2d::{apply_j, intersect_pair, rotate_j, ConvexPolygon, Vec2};
use ehz::symplecto::{compose_chain, inverse_chain, quadrilateral_normal_form, vertex_residual};
use proptest::prelude::*;

fn on_unit_square_boundary(v: &Vec2) -> bool {
    let inside = (-1e-9..=1.0 + 1e-9).contains(&v.x) && (-1e-9..=1.0 + 1e-9).contains(&v.y);
    let d = v.x.abs().min((1.0 - v.x).abs()).min(v.y.abs()).min((1.0 - v.y).abs());
    inside && d <= 1e-9
}

fn is_square_corner(v: &Vec2) -> bool {
    [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        .iter()
        .any(|c| (v - Vec2::new(c[0], c[1])).norm() <= 1e-9)
}

/// Both ±λJ(tri) placed in the unit square, with the image of `apex`.
fn placements(tri: &ConvexPolygon, apex: &Vec2, lam: f64) -> Vec<(ConvexPolygon, Vec2)> {
    [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let placed = place_in_unit_square(&tri.scale(sign), lam);
            let (lo, _) = rotate_j(&tri.scale(sign)).scale(lam).bbox();
            (placed, apply_j(&(apex * sign)) * lam - lo)
        })
        .collect()
}

fn valid_split_params() -> impl Strategy<Value = (f64, f64)> {
    (0.02f64..0.98, 0.02f64..0.98)
        .prop_filter("near a trapezoid line", |(a, b)| (a - b).abs() > 1e-2 && (a + b - 1.0).abs() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tstar_area_is_twice_triangle(d in triangle(0.05), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let d = centered(&d);
        let mjd = rotate_j(&d).neg();
        let v = mjd.vertices();
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let t = v[0] + (v[1] - v[0]) * a + (v[2] - v[0]) * b;
        let spec = t_star(&d, &t).unwrap();
        prop_assert!((spec.hull.area() - 2.0 * d.area()).abs() <= 1e-9);
    }

    #[test]
    fn tstar_on_boundary_is_parallelogram(d in triangle(0.05), s in 0.05f64..0.95, e in 0usize..3) {
        let d = centered(&d);
        let mjd = rotate_j(&d).neg();
        let (p, q) = mjd.edge(e);
        let spec = t_star(&d, &(p + (q - p) * s)).unwrap();
        prop_assert_eq!(spec.kind, TStarKind::Parallelogram);
        prop_assert_eq!(spec.hull.len(), 4);
    }

    #[test]
    fn splitting_triangles_cut_out_the_diamond((a1, a2) in valid_split_params()) {
        let s = splitting_triangles(a1, a2).unwrap();
        let meet = intersect_pair(&s.delta1, &s.delta2).unwrap();
        prop_assert!(vertex_residual(&meet, &diamond(a1, a2).unwrap()) <= 1e-9);
        prop_assert!((s.v2.y - (1.0 - s.v2.x)).abs() <= 1e-12);
        prop_assert!((s.v1.y - s.v1.x).abs() <= 1e-12);
    }

    #[test]
    fn scaled_splitting_triangles_fill_the_square((a1, a2) in valid_split_params()) {
        let s = splitting_triangles(a1, a2).unwrap();
        for (tri, apex, lam) in [(&s.delta1, &s.v1, s.lambda1), (&s.delta2, &s.v2, s.lambda2)] {
            for (placed, apex_img) in placements(tri, apex, lam) {
                prop_assert!(placed.vertices().iter().all(on_unit_square_boundary));
                prop_assert!(is_square_corner(&apex_img));
            }
        }
    }

    #[test]
    fn lambdas_match_closed_form(a1 in 0.02f64..0.98, a2 in 0.02f64..0.98) {
        prop_assume!(a1 > a2 + 1e-2 && a1 + a2 < 1.0 - 1e-2);
        let s = splitting_triangles(a1, a2).unwrap();
        let (l1, l2) = printed_lambdas(a1, a2);
        prop_assert!((s.lambda1 - l1).abs() <= 1e-12);
        prop_assert!((s.lambda2 - l2).abs() <= 1e-12);
    }

    #[test]
    fn cover_triangle_contains_diamond(a in 0.02f64..0.98, anti in any::<bool>()) {
        prop_assume!((a - 0.5).abs() > 1e-2);
        let (a1, a2) = if anti { (a, 1.0 - a) } else { (a, a) };
        let c = trapezoid_cover_triangle(a1, a2).unwrap();
        let dia = diamond(a1, a2).unwrap();
        prop_assert!(dia.vertices().iter().all(|v| c.triangle.contains(v, 1e-12)));
        for (placed, apex_img) in placements(&c.triangle, &c.apex, c.lambda) {
            prop_assert!(placed.vertices().iter().all(on_unit_square_boundary));
            prop_assert!(is_square_corner(&apex_img));
        }
    }

    #[test]
    fn quadrilateral_area_and_chain(
        alpha in -1.2f64..1.2, beta in 0.0f64..6.3,
        a1 in 0.0f64..1.0, a2 in 0.0f64..1.0,
        d1 in 0.3f64..3.0, d2 in 0.3f64..3.0,
        c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
    ) {
        let p = QuadParams { alpha, beta, a1, a2, d1, d2, c1, c2 };
        let q = quadrilateral_from_params(&p).unwrap();
        prop_assert!((q.area() - d1 * d2 / 2.0).abs() <= 1e-12 * (d1 * d2).max(1.0));
        let nf = quadrilateral_normal_form(&p).unwrap();
        let back = compose_chain(&nf.x_chain).apply_polygon(&q);
        prop_assert!(vertex_residual(&back, &diamond(a1, a2).unwrap()) <= 1e-10);
        let again = compose_chain(&inverse_chain(&nf.x_chain).unwrap()).apply_polygon(&back);
        prop_assert!(vertex_residual(&again, &q) <= 1e-10);
    }
}

#[test]
fn half_quarter_instance() {
    // (1 - 1/4 - 1/2) / ((3/4)(1/2)) and (1/2 - 1/4) / ((1/2)(3/4))
    let s = splitting_triangles(0.5, 0.25).unwrap();
    assert!((s.lambda1 - 2.0 / 3.0).abs() < 1e-12);
    assert!((s.lambda2 - 2.0 / 3.0).abs() < 1e-12);
    // apex from the two edge lines through (0, 1/4)-(1/2, 0) and (1, 1/4)-(1/2, 1)
    assert!((s.v2 - Vec2::new(1.5, -0.5)).norm() < 1e-12);
}

#[test]
fn out_of_range_inputs() {
    assert!(diamond(-0.1, 0.5).is_err());
    assert!(splitting_triangles(0.0, 0.5).is_err());
    assert!(trapezoid_cover_triangle(0.3, 0.4).is_err());
    let mut p = QuadParams::identity(0.5, 0.5);
    p.d1 = 0.0;
    assert!(quadrilateral_from_params(&p).is_err());
    p.d1 = 1.0;
    p.alpha = 2.0;
    assert!(quadrilateral_from_params(&p).is_err());
}
