#![allow(dead_code)]

use ehz::geom2d::{convex_hull, ConvexPolygon, Vec2};
use proptest::prelude::*;

pub fn point(r: f64) -> impl Strategy<Value = Vec2> {
    (-r..r, -r..r).prop_map(|(x, y)| Vec2::new(x, y))
}

/// Hull of 3..=n random points with area at least `min_area`.
pub fn polygon(n: usize, min_area: f64) -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec(point(1.0), 3..=n).prop_filter_map("thin hull", move |pts| {
        convex_hull(&pts)
            .ok()
            .filter(|p| !p.is_degenerate() && p.area() >= min_area)
    })
}

pub fn triangle(min_area: f64) -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec(point(1.0), 3).prop_filter_map("thin triangle", move |pts| {
        convex_hull(&pts)
            .ok()
            .filter(|p| p.len() == 3 && p.area() >= min_area)
    })
}

pub fn centered(p: &ConvexPolygon) -> ConvexPolygon {
    p.translate(&(-p.centroid()))
}

pub fn unit_dir() -> impl Strategy<Value = Vec2> {
    (0.0..std::f64::consts::TAU).prop_map(|a| Vec2::new(a.cos(), a.sin()))
}
