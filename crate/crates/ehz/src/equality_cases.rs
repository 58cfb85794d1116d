//! Constructors for the known equality cases: triangle hulls T*, diamonds,
//! the quadrilateral parametrization with its partner parallelogram, and the
//! splitting and cover triangles of a diamond.

use crate::geom2d::{
    convex_hull, cross, rotate_j, ConvexPolygon, GeomError, Mat2, Vec2, EPS_BOUNDARY, EPS_PRED,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EqualityError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("t = ({0}, {1}) is not in -J(Delta)")]
    TNotInMinusJDelta(f64, f64),
    #[error("parameters lie on a trapezoid line, splitting is undefined")]
    TrapezoidCase,
    #[error("parameters are not a trapezoid case")]
    NotTrapezoidParams,
    #[error("expected a triangle")]
    NotTriangle,
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

fn check_unit(name: &str, v: f64) -> Result<(), EqualityError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(EqualityError::ParamOutOfRange(format!("{name} = {v} not in [0, 1]")))
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<(), EqualityError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(EqualityError::ParamOutOfRange(format!("{name} = {v} not in (0, 1)")))
    }
}

/// conv{ {a1} x [0,1], [0,1] x {a2} }.
pub fn diamond(a1: f64, a2: f64) -> Result<ConvexPolygon, EqualityError> {
    check_unit("a1", a1)?;
    check_unit("a2", a2)?;
    diamond_scaled(1.0, a1, a2)
}

/// conv{ {a1} x [0,a], [0,a] x {a2} }.
pub fn diamond_scaled(a: f64, a1: f64, a2: f64) -> Result<ConvexPolygon, EqualityError> {
    if !(a > 0.0) {
        return Err(EqualityError::ParamOutOfRange(format!("a = {a} must be positive")));
    }
    let tol = EPS_PRED * a;
    if a1 < -tol || a1 > a + tol || a2 < -tol || a2 > a + tol {
        return Err(EqualityError::ParamOutOfRange(format!(
            "a1 = {a1}, a2 = {a2} not in [0, {a}]"
        )));
    }
    let pts = [
        Vec2::new(a1, 0.0),
        Vec2::new(a, a2),
        Vec2::new(a1, a),
        Vec2::new(0.0, a2),
    ];
    Ok(convex_hull(&pts)?)
}

pub fn unit_square() -> ConvexPolygon {
    ConvexPolygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("square")
}

/// Square of side `a` with lower-left corner at the origin.
pub fn square(a: f64) -> ConvexPolygon {
    unit_square().scale(a)
}

/// Equilateral triangle with centroid at the origin and unit side.
pub fn standard_triangle() -> ConvexPolygon {
    let s3 = 3f64.sqrt();
    ConvexPolygon::from_coords(&[[-0.5, -0.5 / s3], [0.5, -0.5 / s3], [0.0, 1.0 / s3]])
        .expect("triangle")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TStarKind {
    Hexagon,
    Parallelogram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TStarSpec {
    pub base_triangle: ConvexPolygon,
    pub t: Vec2,
    pub hull: ConvexPolygon,
    pub kind: TStarKind,
}

/// conv{J Delta, -J Delta + t} for a triangle moved to centroid zero.
pub fn t_star(delta: &ConvexPolygon, t: &Vec2) -> Result<TStarSpec, EqualityError> {
    if delta.is_degenerate() || delta.len() != 3 {
        return Err(EqualityError::NotTriangle);
    }
    let base = delta.translate(&(-delta.centroid()));
    let jd = rotate_j(&base);
    let mjd = jd.neg();
    if !mjd.contains(t, EPS_BOUNDARY) {
        return Err(EqualityError::TNotInMinusJDelta(t.x, t.y));
    }
    let mut pts: Vec<Vec2> = jd.vertices().to_vec();
    pts.extend(mjd.vertices().iter().map(|v| v + t));
    let hull = convex_hull(&pts)?;
    let kind = if mjd.boundary_distance(t) <= EPS_BOUNDARY {
        TStarKind::Parallelogram
    } else {
        TStarKind::Hexagon
    };
    let want = 2.0 * base.area();
    if (hull.area() - want).abs() > 1e-9 * want.max(1.0) {
        return Err(EqualityError::IdentityFailed(format!(
            "area {} != 2 area(Delta) = {}",
            hull.area(),
            want
        )));
    }
    Ok(TStarSpec {
        base_triangle: base,
        t: *t,
        hull,
        kind,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    pub alpha: f64,
    pub beta: f64,
    pub a1: f64,
    pub a2: f64,
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl QuadParams {
    /// Parameters that reproduce ◇(a1, a2) unchanged.
    pub fn identity(a1: f64, a2: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            a1,
            a2,
            d1: 1.0,
            d2: 1.0,
            c1: a1,
            c2: a2,
        }
    }

    pub fn validate(&self) -> Result<(), EqualityError> {
        check_unit("a1", self.a1)?;
        check_unit("a2", self.a2)?;
        if !(self.d1 > 0.0 && self.d2 > 0.0) {
            return Err(EqualityError::ParamOutOfRange("d1, d2 must be positive".into()));
        }
        if !(self.alpha.abs() < FRAC_PI_2) {
            return Err(EqualityError::ParamOutOfRange("|alpha| must be below pi/2".into()));
        }
        if !self.beta.is_finite() || !self.c1.is_finite() || !self.c2.is_finite() {
            return Err(EqualityError::ParamOutOfRange("beta, c1, c2 must be finite".into()));
        }
        Ok(())
    }

    /// Shear-scale matrix [[d1, 0], [d1 tan(alpha), d2]].
    pub fn shear_scale(&self) -> Mat2 {
        Mat2::new(self.d1, 0.0, self.d1 * self.alpha.tan(), self.d2)
    }

    pub fn corner(&self) -> Vec2 {
        Vec2::new(self.a1, self.a2)
    }

    pub fn shift(&self) -> Vec2 {
        Vec2::new(self.c1, self.c2)
    }
}

/// Counterclockwise rotation by `theta`.
pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// R_{-beta} Ã (x - a) + c applied to ◇(a1, a2).
pub fn quadrilateral_from_params(p: &QuadParams) -> Result<ConvexPolygon, EqualityError> {
    p.validate()?;
    let m = rotation(-p.beta) * p.shear_scale();
    let shift = p.shift() - m * p.corner();
    Ok(diamond(p.a1, p.a2)?.map_affine(&m, &shift))
}

/// R_{-beta} (Ã^{-1})^T applied to the unit square.
pub fn equality_partner(p: &QuadParams) -> Result<ConvexPolygon, EqualityError> {
    p.validate()?;
    let inv = p
        .shear_scale()
        .try_inverse()
        .ok_or_else(|| EqualityError::ParamOutOfRange("singular shear".into()))?;
    Ok(unit_square().map_linear(&(rotation(-p.beta) * inv.transpose())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingTriangles {
    pub a1: f64,
    pub a2: f64,
    pub delta1: ConvexPolygon,
    pub delta2: ConvexPolygon,
    pub v1: Vec2,
    pub v2: Vec2,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// The diamond's edges E1..E4 as (start, end).
fn diamond_edges(a1: f64, a2: f64) -> [(Vec2, Vec2); 4] {
    let p0 = Vec2::new(a1, 0.0);
    let p1 = Vec2::new(1.0, a2);
    let p2 = Vec2::new(a1, 1.0);
    let p3 = Vec2::new(0.0, a2);
    [(p3, p0), (p0, p1), (p1, p2), (p2, p3)]
}

fn line_meet(e: &(Vec2, Vec2), f: &(Vec2, Vec2)) -> Option<Vec2> {
    let d1 = e.1 - e.0;
    let d2 = f.1 - f.0;
    let den = cross(&d1, &d2);
    if den.abs() <= EPS_PRED * d1.norm() * d2.norm() {
        return None;
    }
    let s = cross(&(f.0 - e.0), &d2) / den;
    Some(e.0 + d1 * s)
}

/// Triangle bounded by the lines of `e` and `f` and the diamond side that
/// closes them off: apex plus the endpoint of each edge farther from it.
fn extended_triangle(
    e: &(Vec2, Vec2),
    f: &(Vec2, Vec2),
) -> Result<(ConvexPolygon, Vec2), EqualityError> {
    let v = line_meet(e, f).ok_or(EqualityError::TrapezoidCase)?;
    let far = |g: &(Vec2, Vec2)| {
        if (g.0 - v).norm() > (g.1 - v).norm() {
            g.0
        } else {
            g.1
        }
    };
    Ok((convex_hull(&[v, far(e), far(f)])?, v))
}

/// 1 / side of the bounding square of a triangle whose bounding box is square.
fn box_lambda(tri: &ConvexPolygon) -> f64 {
    let (lo, hi) = tri.bbox();
    let side = (hi - lo).max();
    1.0 / side
}

/// Closed-form lambdas; valid only for a1 > a2 and a1 + a2 < 1.
pub fn printed_lambdas(a1: f64, a2: f64) -> (f64, f64) {
    (
        (1.0 - a2 - a1) / ((1.0 - a2) * (1.0 - a1)),
        (a1 - a2) / (a1 * (1.0 - a2)),
    )
}

fn on_trapezoid_line(a1: f64, a2: f64) -> (bool, bool) {
    ((a1 - a2).abs() <= EPS_PRED, (a1 + a2 - 1.0).abs() <= EPS_PRED)
}

pub fn splitting_triangles(a1: f64, a2: f64) -> Result<SplittingTriangles, EqualityError> {
    check_open_unit("a1", a1)?;
    check_open_unit("a2", a2)?;
    let (eq, anti) = on_trapezoid_line(a1, a2);
    if eq || anti {
        return Err(EqualityError::TrapezoidCase);
    }
    let e = diamond_edges(a1, a2);
    let (delta2, v2) = extended_triangle(&e[0], &e[2])?;
    let (delta1, v1) = extended_triangle(&e[1], &e[3])?;
    Ok(SplittingTriangles {
        a1,
        a2,
        lambda1: box_lambda(&delta1),
        lambda2: box_lambda(&delta2),
        delta1,
        delta2,
        v1,
        v2,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrapezoidCover {
    pub triangle: ConvexPolygon,
    pub apex: Vec2,
    pub lambda: f64,
    pub diagonal: (Vec2, Vec2),
}

/// Cover triangle of a trapezoidal diamond, from its two non-parallel edges.
pub fn trapezoid_cover_triangle(a1: f64, a2: f64) -> Result<TrapezoidCover, EqualityError> {
    check_open_unit("a1", a1)?;
    check_open_unit("a2", a2)?;
    let e = diamond_edges(a1, a2);
    let (eq, anti) = on_trapezoid_line(a1, a2);
    let (pair, diagonal) = match (eq, anti) {
        (true, false) => ((e[1], e[3]), (Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0))),
        (false, true) => ((e[0], e[2]), (Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0))),
        _ => return Err(EqualityError::NotTrapezoidParams),
    };
    let (triangle, apex) = extended_triangle(&pair.0, &pair.1)?;
    Ok(TrapezoidCover {
        lambda: box_lambda(&triangle),
        triangle,
        apex,
        diagonal,
    })
}

/// lambda J(tri) moved so its bounding box is the unit square.
pub fn place_in_unit_square(tri: &ConvexPolygon, lambda: f64) -> ConvexPolygon {
    let img = rotate_j(tri).scale(lambda);
    let (lo, _) = img.bbox();
    img.translate(&(-lo))
}

/// Named members of the verified equality catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogProduct {
    pub name: String,
    pub k: ConvexPolygon,
    pub t: ConvexPolygon,
}

pub fn square_diamond_product(a1: f64, a2: f64) -> Result<CatalogProduct, EqualityError> {
    Ok(CatalogProduct {
        name: format!("square x diamond({a1}, {a2})"),
        k: unit_square(),
        t: diamond(a1, a2)?,
    })
}

pub fn triangle_tstar_product(delta: &ConvexPolygon, t: &Vec2) -> Result<CatalogProduct, EqualityError> {
    let spec = t_star(delta, t)?;
    Ok(CatalogProduct {
        name: format!("triangle x T* ({:?}, t = ({}, {}))", spec.kind, t.x, t.y),
        k: spec.base_triangle,
        t: spec.hull,
    })
}

pub fn quad_partner_product(p: &QuadParams) -> Result<CatalogProduct, EqualityError> {
    Ok(CatalogProduct {
        name: "quadrilateral x partner".into(),
        k: quadrilateral_from_params(p)?,
        t: equality_partner(p)?,
    })
}
