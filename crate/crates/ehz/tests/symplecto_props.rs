mod common;

use common::polygon;
use ehz::capacity::ehz_capacity;
use ehz::equality_cases::{
    diamond, equality_partner, quadrilateral_from_params, standard_triangle, t_star, unit_square,
    QuadParams,
};
use ehz::geom2d::{j_matrix, Mat2, Vec2};
use ehz::symplecto::{
    compose_chain, minus_j_standard_vertices, product_transform, quadrilateral_normal_form,
    triangle_normal_form, verify_det_identity, AffineMap2,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s3() -> f64 {
    3f64.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn det_identity_holds(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
        prop_assert!(verify_det_identity(&AffineMap2::linear(Mat2::new(a, b, c, d))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn volume_product_is_preserved(
        k in polygon(7, 0.05), t in polygon(7, 0.05),
        m in prop::array::uniform4(-3.0f64..3.0), shift in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let phi = AffineMap2::new(Mat2::new(m[0], m[1], m[2], m[3]), Vec2::new(shift[0], shift[1]));
        prop_assume!(phi.det().abs() > 1e-2);
        let (pk, pt) = product_transform(&phi, &Vec2::new(1.0, -1.0), &k, &t).unwrap();
        let before = k.area() * t.area();
        prop_assert!((pk.area() * pt.area() - before).abs() <= 1e-9 * before);
    }
}

fn edge_point(e: usize, s: f64) -> Vec2 {
    let v = minus_j_standard_vertices();
    v[e] + (v[(e + 1) % 3] - v[e]) * s
}

#[test]
fn normal_form_residuals_per_edge() {
    for e in 0..3 {
        for k in 0..30 {
            let nf = triangle_normal_form(&edge_point(e, (k as f64 + 0.5) / 30.0)).unwrap();
            assert_eq!(nf.edge, e + 1);
            let (rk, rt) = nf.residuals().unwrap();
            assert!(rk <= 1e-12 && rt <= 1e-12, "edge {} sample {k}: {rk:e} {rt:e}", e + 1);
        }
    }
}

/// The printed translations, applied before the linear map, reproduce our
/// affine maps wherever they are consistent.
#[test]
fn printed_translations_agree() {
    for k in 0..10 {
        let s = (k as f64 + 0.5) / 10.0;
        let t = edge_point(0, s);
        let nf = triangle_normal_form(&t).unwrap();
        let inv_t = nf.matrix.transpose().try_inverse().unwrap();
        let s1 = Vec2::new(0.5, 1.0 / (2.0 * s3()));
        let s2 = Vec2::new(1.0 / (2.0 * s3()), 0.5);
        assert!((nf.x_map.shift - nf.matrix * s1).norm() < 1e-12);
        assert!((nf.y_map.shift - inv_t * s2).norm() < 1e-12);

        let t = edge_point(1, s);
        let nf = triangle_normal_form(&t).unwrap();
        let inv_t = nf.matrix.transpose().try_inverse().unwrap();
        assert!((nf.y_map.shift - inv_t * s2).norm() < 1e-12);
        assert!((t.y - (t.x / s3() + 1.0 / 3.0)).abs() < 1e-12);

        let t = edge_point(2, s);
        let nf = triangle_normal_form(&t).unwrap();
        let inv_t = nf.matrix.transpose().try_inverse().unwrap();
        let s2 = Vec2::new(-t.x - 1.0 / (2.0 * s3()), t.x / s3() + 5.0 / 6.0);
        assert!((nf.y_map.shift - inv_t * s2).norm() < 1e-12);
        assert!((t.y - (-t.x / s3() - 1.0 / 3.0)).abs() < 1e-12);
    }
}

#[test]
fn normal_form_parameters() {
    let nf = triangle_normal_form(&edge_point(1, 0.5)).unwrap();
    let t1 = edge_point(1, 0.5).x;
    assert!((nf.ball.a2 - (1.0 / (2.0 * s3()) - t1)).abs() < 1e-15);
    assert!((nf.ball.a - s3() / 2.0).abs() < 1e-15);
    assert!((nf.ball.radius.powi(2) * std::f64::consts::PI - nf.ball.a).abs() < 1e-12);
    assert_eq!(nf.ball.volume, nf.ball.a * nf.ball.a / 2.0);
    // a vertex shared by edges 1 and 2 resolves to edge 1
    let v = minus_j_standard_vertices();
    assert_eq!(triangle_normal_form(&v[1]).unwrap().edge, 1);
    assert!(triangle_normal_form(&Vec2::new(1.0, 1.0)).is_err());
}

#[test]
fn quadrilateral_chains() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let d1 = r.gen_range(0.4..2.5);
        let p = QuadParams {
            alpha: r.gen_range(-1.0..1.0),
            beta: r.gen_range(0.0..6.0),
            a1: r.gen_range(0.0..1.0),
            a2: r.gen_range(0.0..1.0),
            d1,
            d2: 1.0 / d1,
            c1: r.gen_range(-1.0..1.0),
            c2: r.gen_range(-1.0..1.0),
        };
        let nf = quadrilateral_normal_form(&p).unwrap();
        let (rq, rp) = nf.residuals(&p).unwrap();
        assert!(rq < 1e-10 && rp < 1e-10);
        let vol = quadrilateral_from_params(&p).unwrap().area() * equality_partner(&p).unwrap().area();
        assert!((vol - 0.5).abs() < 1e-12);
        assert!((nf.ball.volume - vol).abs() < 1e-12);
        assert!((nf.ball.radius - (1.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }
    let id = compose_chain(&quadrilateral_normal_form(&QuadParams::identity(0.2, 0.9)).unwrap().y_chain);
    assert!((id.matrix - Mat2::identity()).norm() < 1e-15);
}

#[test]
fn product_transform_examples() {
    let k = diamond(0.3, 0.7).unwrap();
    let t = unit_square();
    let (k2, t2) = product_transform(&AffineMap2::identity(), &Vec2::zeros(), &k, &t).unwrap();
    assert_eq!((k2, t2), (k.clone(), t.clone()));
    let phi = AffineMap2::linear(Mat2::new(2.0, 0.0, 0.0, 1.0));
    let (k2, t2) = product_transform(&phi, &Vec2::zeros(), &k, &t).unwrap();
    assert!((k2.area() * t2.area() - k.area() * t.area()).abs() < 1e-15);
    assert!(product_transform(&AffineMap2::linear(Mat2::zeros()), &Vec2::zeros(), &k, &t).is_err());

    let tri = standard_triangle();
    let hex = t_star(&tri, &Vec2::new(0.05, 0.02)).unwrap().hull;
    let (jk, jt) = product_transform(&AffineMap2::linear(j_matrix()), &Vec2::zeros(), &tri, &hex).unwrap();
    let a = ehz_capacity(&tri, &hex).unwrap().value;
    let b = ehz_capacity(&jk, &jt).unwrap().value;
    assert!((a - b).abs() <= 1e-3 * a);
}

#[test]
fn capacity_is_symplectically_invariant() {
    let mut r = ChaCha8Rng::seed_from_u64(17);
    let tri = standard_triangle();
    let p = QuadParams {
        alpha: 0.3,
        beta: 1.1,
        a1: 0.35,
        a2: 0.6,
        d1: 1.4,
        d2: 0.9,
        c1: 0.2,
        c2: -0.1,
    };
    let products = vec![
        (unit_square(), diamond(0.5, 0.25).unwrap()),
        (unit_square(), diamond(0.8, 0.1).unwrap()),
        (tri.clone(), t_star(&tri, &Vec2::zeros()).unwrap().hull),
        (tri.clone(), t_star(&tri, &minus_j_standard_vertices()[2]).unwrap().hull),
        (quadrilateral_from_params(&p).unwrap(), equality_partner(&p).unwrap()),
    ];
    for (k, t) in &products {
        let base = ehz_capacity(k, t).unwrap().value;
        for _ in 0..10 {
            let m = loop {
                let m = Mat2::from_fn(|_, _| r.gen_range(-2.0..2.0));
                let d: f64 = m.determinant();
                if d.abs() > 0.2 {
                    break m / d.abs().sqrt();
                }
            };
            let (pk, pt) = product_transform(&AffineMap2::linear(m), &Vec2::zeros(), k, t).unwrap();
            let v = ehz_capacity(&pk, &pt).unwrap().value;
            assert!((v - base).abs() <= 1e-3 * base, "{v} vs {base}");
        }
    }
}
