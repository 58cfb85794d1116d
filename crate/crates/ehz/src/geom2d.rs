//! Planar convex polygons: construction, measures, support and gauge
//! functions, polarity, normal cones, intersection and translation fitting.
//!
//! Polygons are stored counterclockwise with collinear vertices removed.
//! A two-vertex polygon is a segment and carries `degenerate = true`.

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use thiserror::Error;

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Tolerance for predicates on constructed inputs.
pub const EPS_PRED: f64 = 1e-12;
/// Tolerance for derived boundary membership.
pub const EPS_BOUNDARY: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("need at least two distinct points")]
    DegenerateInput,
    #[error("origin is not an interior point of the polygon")]
    OriginNotInterior,
    #[error("point ({0}, {1}) is not on the polygon boundary")]
    NotOnBoundary(f64, f64),
    #[error("vertices do not describe a convex polygon")]
    NotConvex,
    #[error("operation needs a polygon with positive area")]
    DegeneratePolygon,
    #[error("curve needs 2 or 3 distinct vertices, no vertex on the segment of the other two")]
    BadCurve,
}

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// The fixed symplectic rotation J(x, y) = (y, -x).
#[inline]
pub fn apply_j(v: &Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

pub fn j_matrix() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    degenerate: bool,
}

impl ConvexPolygon {
    /// Builds a polygon from a vertex cycle in either orientation.
    ///
    /// Repeated and collinear vertices are dropped. Fails with `NotConvex`
    /// if the cycle turns both ways or winds more than once.
    pub fn from_vertices(points: &[Vec2]) -> Result<Self, GeomError> {
        let scale = points
            .iter()
            .fold(1.0_f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
        let tol = EPS_PRED * scale;
        let mut pts: Vec<Vec2> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last().map_or(true, |q: &Vec2| (p - q).norm() > tol) {
                pts.push(*p);
            }
        }
        while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= tol {
            pts.pop();
        }
        if pts.len() < 2 {
            return Err(GeomError::DegenerateInput);
        }
        if signed_area(&pts).abs() <= EPS_PRED * scale * scale {
            // all points must lie on one line
            let hull = convex_hull(&pts)?;
            if !hull.degenerate {
                return Err(GeomError::NotConvex);
            }
            return Ok(hull);
        }
        if signed_area(&pts) < 0.0 {
            pts.reverse();
        }
        loop {
            let n = pts.len();
            let mut removed = false;
            for i in 0..n {
                let a = pts[(i + n - 1) % n];
                let b = pts[i];
                let c = pts[(i + 1) % n];
                let (e1, e2) = (b - a, c - b);
                let cr = cross(&e1, &e2);
                if cr.abs() <= EPS_PRED * e1.norm() * e2.norm() {
                    if e1.dot(&e2) < 0.0 {
                        return Err(GeomError::NotConvex);
                    }
                    pts.remove(i);
                    removed = true;
                    break;
                }
                if cr < 0.0 {
                    return Err(GeomError::NotConvex);
                }
            }
            if !removed {
                break;
            }
        }
        // total turning must be a single revolution
        let n = pts.len();
        let mut turn = 0.0;
        for i in 0..n {
            let e1 = pts[(i + 1) % n] - pts[i];
            let e2 = pts[(i + 2) % n] - pts[(i + 1) % n];
            turn += cross(&e1, &e2).atan2(e1.dot(&e2));
        }
        if (turn - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(GeomError::NotConvex);
        }
        Ok(Self {
            vertices: pts,
            degenerate: false,
        })
    }

    pub fn from_coords(coords: &[[f64; 2]]) -> Result<Self, GeomError> {
        let pts: Vec<Vec2> = coords.iter().map(|c| Vec2::new(c[0], c[1])).collect();
        Self::from_vertices(&pts)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn require_solid(&self) -> Result<(), GeomError> {
        if self.degenerate {
            Err(GeomError::DegeneratePolygon)
        } else {
            Ok(())
        }
    }

    pub fn coords(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|v| [v.x, v.y]).collect()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edge_count(&self) -> usize {
        if self.degenerate {
            1
        } else {
            self.vertices.len()
        }
    }

    /// Outward unit normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge(i);
        let d = b - a;
        Vec2::new(d.y, -d.x) / d.norm()
    }

    /// Halfplane description: `<n_i, x> <= c_i`.
    pub fn halfplanes(&self) -> Vec<(Vec2, f64)> {
        (0..self.vertices.len())
            .map(|i| {
                let n = self.outward_normal(i);
                (n, n.dot(&self.vertices[i]))
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            signed_area(&self.vertices)
        }
    }

    pub fn perimeter(&self) -> f64 {
        if self.degenerate {
            return 2.0 * (self.vertices[1] - self.vertices[0]).norm();
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[(i + 1) % n] - self.vertices[i]).norm())
            .sum()
    }

    /// Area centroid; the midpoint for segments.
    pub fn centroid(&self) -> Vec2 {
        if self.degenerate {
            return (self.vertices[0] + self.vertices[1]) * 0.5;
        }
        let n = self.vertices.len();
        let o = self.vertices[0];
        let mut acc = Vec2::zeros();
        let mut a2 = 0.0;
        for i in 1..n - 1 {
            let p = self.vertices[i] - o;
            let q = self.vertices[i + 1] - o;
            let w = cross(&p, &q);
            acc += (p + q) * w;
            a2 += w;
        }
        o + acc / (3.0 * a2)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// (min corner, max corner) of the axis-aligned bounding box.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::repeat(f64::INFINITY);
        let mut hi = Vec2::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    pub fn translate(&self, t: &Vec2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            degenerate: self.degenerate,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_linear(&(Mat2::identity() * s))
    }

    /// Image under `x -> m x`. Orientation is restored for det < 0.
    pub fn map_linear(&self, m: &Mat2) -> Self {
        self.map_affine(m, &Vec2::zeros())
    }

    pub fn map_affine(&self, m: &Mat2, shift: &Vec2) -> Self {
        let mut vertices: Vec<Vec2> = self.vertices.iter().map(|v| m * v + shift).collect();
        if m.determinant() < 0.0 && !self.degenerate {
            vertices.reverse();
        }
        Self {
            vertices,
            degenerate: self.degenerate,
        }
    }

    /// Point reflection through the origin.
    pub fn neg(&self) -> Self {
        self.map_linear(&(-Mat2::identity()))
    }

    pub fn contains(&self, x: &Vec2, tol: f64) -> bool {
        if self.degenerate {
            return segment_distance(x, &self.vertices[0], &self.vertices[1]) <= tol;
        }
        self.halfplanes().iter().all(|(n, c)| n.dot(x) <= c + tol)
    }

    /// Distance from `x` to the boundary.
    pub fn boundary_distance(&self, x: &Vec2) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(x, &a, &b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Arc-length parameters of the vertices, starting at 0 for vertex 0.
    pub fn vertex_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut s = 0.0;
        for i in 0..self.vertices.len() {
            out.push(s);
            let (a, b) = self.edge(i);
            s += (b - a).norm();
        }
        out
    }

    /// Boundary point at arc length `s` (taken modulo the perimeter).
    pub fn boundary_point(&self, s: f64) -> Vec2 {
        let (i, t) = self.locate_param(s);
        let (a, b) = self.edge(i);
        a + (b - a) * t
    }

    /// Edge index and fraction along it for arc length `s`.
    pub fn locate_param(&self, s: f64) -> (usize, f64) {
        let per = self.perimeter();
        let mut s = s.rem_euclid(per);
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            let len = (b - a).norm();
            if s <= len || i == n - 1 {
                return (i, (s / len).clamp(0.0, 1.0));
            }
            s -= len;
        }
        unreachable!()
    }

    /// Arc-length parameter of the boundary point nearest to `x`.
    pub fn boundary_param(&self, x: &Vec2) -> f64 {
        let params = self.vertex_params();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            let d = b - a;
            let len = d.norm();
            let t = ((x - a).dot(&d) / (len * len)).clamp(0.0, 1.0);
            let dist = (a + d * t - x).norm();
            if dist < best.0 {
                best = (dist, params[i] + t * len);
            }
        }
        best.1
    }
}

fn signed_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(&pts[i], &pts[(i + 1) % n]);
    }
    0.5 * s
}

pub fn segment_distance(x: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    if l2 == 0.0 {
        return (x - a).norm();
    }
    let t = ((x - a).dot(&d) / l2).clamp(0.0, 1.0);
    (a + d * t - x).norm()
}

/// Minimal counterclockwise hull (Andrew's monotone chain).
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon, GeomError> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let scale = pts
        .iter()
        .fold(1.0_f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let tol = EPS_PRED * scale;
    pts.dedup_by(|a, b| (*a - *b).norm() <= tol);
    if pts.len() < 2 {
        return Err(GeomError::DegenerateInput);
    }
    let turn = |o: &Vec2, a: &Vec2, b: &Vec2| {
        let (u, v) = (a - o, b - o);
        cross(&u, &v) > EPS_PRED * u.norm() * v.norm()
    };
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && !turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && !turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() < 3 {
        // collinear input: keep the two extreme points
        let (a, b) = (pts[0], pts[pts.len() - 1]);
        return Ok(ConvexPolygon {
            vertices: vec![a, b],
            degenerate: true,
        });
    }
    Ok(ConvexPolygon {
        vertices: hull,
        degenerate: false,
    })
}

/// Area of the convex hull of a point cloud; 0 for collinear input.
pub fn hull_area(points: &[Vec2]) -> f64 {
    match convex_hull(points) {
        Ok(h) => h.area(),
        Err(_) => 0.0,
    }
}

/// h_P(u) = max over vertices of <u, v>.
pub fn support_function(p: &ConvexPolygon, u: &Vec2) -> f64 {
    p.vertices
        .iter()
        .map(|v| v.dot(u))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn require_origin_interior(p: &ConvexPolygon) -> Result<Vec<(Vec2, f64)>, GeomError> {
    if p.degenerate {
        return Err(GeomError::OriginNotInterior);
    }
    let hp = p.halfplanes();
    if hp.iter().any(|(_, c)| *c <= EPS_BOUNDARY) {
        return Err(GeomError::OriginNotInterior);
    }
    Ok(hp)
}

/// Minkowski functional of `p` at `x`.
pub fn gauge(p: &ConvexPolygon, x: &Vec2) -> Result<f64, GeomError> {
    let hp = require_origin_interior(p)?;
    Ok(hp
        .iter()
        .map(|(n, c)| n.dot(x) / c)
        .fold(0.0_f64, f64::max))
}

pub fn polar(p: &ConvexPolygon) -> Result<ConvexPolygon, GeomError> {
    let hp = require_origin_interior(p)?;
    let verts: Vec<Vec2> = hp.iter().map(|(n, c)| n / *c).collect();
    ConvexPolygon::from_vertices(&verts)
}

pub fn rotate_j(p: &ConvexPolygon) -> ConvexPolygon {
    ConvexPolygon {
        vertices: p.vertices.iter().map(apply_j).collect(),
        degenerate: p.degenerate,
    }
}

/// Closed convex cone from `ray_lo` counterclockwise to `ray_hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone2 {
    pub apex: Vec2,
    pub ray_lo: Vec2,
    pub ray_hi: Vec2,
}

impl Cone2 {
    pub fn is_ray(&self) -> bool {
        (self.ray_lo - self.ray_hi).norm() <= EPS_PRED
    }

    /// Opening angle in [0, pi].
    pub fn angle(&self) -> f64 {
        cross(&self.ray_lo, &self.ray_hi)
            .atan2(self.ray_lo.dot(&self.ray_hi))
            .max(0.0)
    }

    pub fn contains_direction(&self, d: &Vec2) -> bool {
        let tol = EPS_PRED * d.norm();
        cross(&self.ray_lo, d) >= -tol && cross(d, &self.ray_hi) >= -tol && {
            // reject the antipodal sector
            let mid = self.ray_lo + self.ray_hi;
            mid.norm() < EPS_PRED || mid.dot(d) >= -tol
        }
    }
}

/// Where a boundary point sits: inside edge `i`, or at vertex `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundarySite {
    Edge(usize),
    Vertex(usize),
}

/// Classifies a boundary point with arc-length margin `EPS_BOUNDARY`.
pub fn boundary_site(p: &ConvexPolygon, x: &Vec2) -> Result<BoundarySite, GeomError> {
    p.require_solid()?;
    let n = p.len();
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..n {
        let (a, b) = p.edge(i);
        let d = segment_distance(x, &a, &b);
        if d < best.0 {
            best = (d, i);
        }
    }
    if best.0 > EPS_BOUNDARY {
        return Err(GeomError::NotOnBoundary(x.x, x.y));
    }
    let i = best.1;
    let (a, b) = p.edge(i);
    let len = (b - a).norm();
    let s = (x - a).dot(&(b - a)) / len;
    if s <= EPS_BOUNDARY {
        Ok(BoundarySite::Vertex(i))
    } else if s >= len - EPS_BOUNDARY {
        Ok(BoundarySite::Vertex((i + 1) % n))
    } else {
        Ok(BoundarySite::Edge(i))
    }
}

pub fn normal_cone(p: &ConvexPolygon, x: &Vec2) -> Result<Cone2, GeomError> {
    let n = p.len();
    Ok(match boundary_site(p, x)? {
        BoundarySite::Edge(i) => {
            let nrm = p.outward_normal(i);
            Cone2 {
                apex: *x,
                ray_lo: nrm,
                ray_hi: nrm,
            }
        }
        BoundarySite::Vertex(i) => Cone2 {
            apex: *x,
            ray_lo: p.outward_normal((i + n - 1) % n),
            ray_hi: p.outward_normal(i),
        },
    })
}

/// Parameter interval of the line `x + tau u` inside `p`, if nonempty.
pub fn line_clip(p: &ConvexPolygon, x: &Vec2, u: &Vec2) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let unorm = u.norm();
    for (n, c) in p.halfplanes() {
        let slack = c - n.dot(x);
        let dn = n.dot(u);
        if dn.abs() <= EPS_PRED * unorm {
            if slack < -EPS_BOUNDARY {
                return None;
            }
        } else if dn > 0.0 {
            hi = hi.min(slack / dn);
        } else {
            lo = lo.max(slack / dn);
        }
    }
    (hi >= lo).then_some((lo, hi))
}

/// Longest chord parallel to `u` with its endpoints.
pub fn chord_with_endpoints(p: &ConvexPolygon, u: &Vec2) -> (f64, Vec2, Vec2) {
    let u = u.normalize();
    if p.degenerate {
        let (a, b) = (p.vertices[0], p.vertices[1]);
        let d = b - a;
        if cross(&d, &u).abs() <= EPS_PRED * d.norm() {
            return (d.norm(), a, b);
        }
        return (0.0, a, a);
    }
    let hp = p.halfplanes();
    let n = hp.len();
    let mut best = (f64::NEG_INFINITY, Vec2::zeros(), Vec2::zeros());
    for (j, v) in p.vertices.iter().enumerate() {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (i, (nrm, c)) in hp.iter().enumerate() {
            // v lies exactly on its two incident edge lines
            let slack = if i == j || (i + 1) % n == j { 0.0 } else { c - nrm.dot(v) };
            let dn = nrm.dot(&u);
            if dn.abs() <= EPS_PRED {
                continue;
            }
            if dn > 0.0 {
                hi = hi.min(slack / dn);
            } else {
                lo = lo.max(slack / dn);
            }
        }
        if hi >= lo && hi - lo > best.0 {
            best = (hi - lo, v + u * lo, v + u * hi);
        }
    }
    best
}

pub fn chord_length(p: &ConvexPolygon, u: &Vec2) -> f64 {
    chord_with_endpoints(p, u).0
}

/// Clips a vertex loop to `<n, x> <= c + tol`.
fn clip_halfplane(poly: &[Vec2], n: &Vec2, c: f64, tol: f64) -> Vec<Vec2> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 2);
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let fa = n.dot(&a) - c;
        let fb = n.dot(&b) - c;
        let ina = fa <= tol;
        let inb = fb <= tol;
        if ina {
            out.push(a);
        }
        if ina != inb && (fa - fb).abs() > 0.0 {
            let t = fa / (fa - fb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

fn constraint_set(q: &ConvexPolygon) -> Vec<(Vec2, f64)> {
    if !q.degenerate {
        return q.halfplanes();
    }
    let (a, b) = (q.vertices[0], q.vertices[1]);
    let d = (b - a).normalize();
    let n = Vec2::new(d.y, -d.x);
    vec![
        (n, n.dot(&a)),
        (-n, -n.dot(&a)),
        (d, d.dot(&b)),
        (-d, -d.dot(&a)),
    ]
}

/// Intersection of two convex polygons. `None` when empty or a single point.
pub fn intersect_pair(p: &ConvexPolygon, q: &ConvexPolygon) -> Option<ConvexPolygon> {
    let scale = p
        .vertices
        .iter()
        .chain(q.vertices.iter())
        .fold(1.0_f64, |m, v| m.max(v.x.abs()).max(v.y.abs()));
    let tol = EPS_PRED * scale;
    let mut cur: Vec<Vec2> = p.vertices.clone();
    for (n, c) in constraint_set(q) {
        cur = clip_halfplane(&cur, &n, c, tol);
        if cur.is_empty() {
            return None;
        }
    }
    // symmetric pass so the result does not depend on argument order
    for (n, c) in constraint_set(p) {
        cur = clip_halfplane(&cur, &n, c, tol);
        if cur.is_empty() {
            return None;
        }
    }
    convex_hull(&cur).ok()
}

/// A closed polygonal curve with two or three vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedPolygonalCurve {
    vertices: Vec<Vec2>,
}

impl ClosedPolygonalCurve {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeomError> {
        match vertices.len() {
            2 => {
                if (vertices[0] - vertices[1]).norm() <= EPS_PRED {
                    return Err(GeomError::BadCurve);
                }
            }
            3 => {
                for i in 0..3 {
                    let (a, b, c) = (vertices[i], vertices[(i + 1) % 3], vertices[(i + 2) % 3]);
                    if segment_distance(&a, &b, &c) <= EPS_PRED {
                        return Err(GeomError::BadCurve);
                    }
                }
            }
            _ => return Err(GeomError::BadCurve),
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn translate(&self, t: &Vec2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        }
    }

    pub fn coords(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|v| [v.x, v.y]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub fits: bool,
    pub witness: Option<Vec2>,
}

/// Whether some translate of `q` lies in the interior of `k`.
///
/// Folds `intersect_pair` over the sets `k - q_j`; the curve fits when the
/// result has area above `1e-12 * area(k)`.
pub fn fits_by_translation(q: &ClosedPolygonalCurve, k: &ConvexPolygon) -> FitResult {
    let no = FitResult {
        fits: false,
        witness: None,
    };
    if k.degenerate {
        return no;
    }
    let mut acc = k.translate(&(-q.vertices[0]));
    for v in &q.vertices[1..] {
        match intersect_pair(&acc, &k.translate(&(-v))) {
            Some(next) => acc = next,
            None => return no,
        }
    }
    if acc.area() > EPS_PRED * k.area() {
        FitResult {
            fits: true,
            witness: Some(acc.centroid()),
        }
    } else {
        no
    }
}

pub fn regular_polygon(n: usize, radius: f64) -> ConvexPolygon {
    let verts: Vec<Vec2> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            Vec2::new(radius * a.cos(), radius * a.sin())
        })
        .collect();
    ConvexPolygon::from_vertices(&verts).expect("regular polygon")
}

/// Hull of `n` uniform points in the square `[-r, r]^2`, retried until it
/// has area at least `min_area`.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n: usize, r: f64, min_area: f64) -> ConvexPolygon {
    loop {
        let pts: Vec<Vec2> = (0..n.max(3))
            .map(|_| Vec2::new(rng.gen_range(-r..r), rng.gen_range(-r..r)))
            .collect();
        if let Ok(p) = convex_hull(&pts) {
            if !p.degenerate && p.area() >= min_area {
                return p;
            }
        }
    }
}

/// Random triangle with vertices uniform in `[-r, r]^2` and area at least `min_area`.
pub fn random_triangle<R: Rng>(rng: &mut R, r: f64, min_area: f64) -> ConvexPolygon {
    loop {
        let p = random_convex_polygon(rng, 3, r, min_area);
        if p.len() == 3 {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> ConvexPolygon {
        ConvexPolygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.2, 0.2),
        ])
        .unwrap();
        assert_eq!(h.len(), 3);
        assert!((h.area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hull_of_two_points_is_segment() {
        let h = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)]).unwrap();
        assert!(h.is_degenerate());
        assert_eq!(h.area(), 0.0);
        assert!(convex_hull(&[Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)]).is_err());
    }

    #[test]
    fn reader_fixes_orientation_and_collinear() {
        let p = ConvexPolygon::from_coords(&[
            [0.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [1.0, 0.5],
            [1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.area() > 0.0);
        let bow = ConvexPolygon::from_coords(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(bow, Err(GeomError::NotConvex));
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_function(&sq(), &Vec2::new(1.0, 1.0)), 2.0);
        let d = ConvexPolygon::from_coords(&[[0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]]).unwrap();
        assert_eq!(support_function(&d, &Vec2::new(1.0, 0.0)), 1.0);
    }

    #[test]
    fn gauge_examples() {
        let disk = regular_polygon(64, 1.0);
        let g = gauge(&disk, &Vec2::new(0.5, 0.0)).unwrap();
        assert!((g - 0.5).abs() < 1e-3);
        let d = ConvexPolygon::from_coords(&[[0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]])
            .unwrap()
            .translate(&Vec2::new(-0.5, -0.5));
        assert!((gauge(&d, &Vec2::new(0.5, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(gauge(&sq(), &Vec2::new(0.5, 0.5)), Err(GeomError::OriginNotInterior));
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let s = sq().translate(&Vec2::new(-0.5, -0.5)).scale(2.0);
        let p = polar(&s).unwrap();
        assert_eq!(p.len(), 4);
        for v in p.vertices() {
            assert!((v.x.abs() + v.y.abs() - 1.0).abs() < 1e-12);
            assert!(v.x.abs() < 1e-12 || v.y.abs() < 1e-12);
        }
    }

    #[test]
    fn polar_of_triangle_by_edge_lines() {
        let t = ConvexPolygon::from_coords(&[[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let p = polar(&t).unwrap();
        // edge lines y = -1, x + y = 1, x = -1 give (0,-1), (1,1), (-1,0)
        let want = [Vec2::new(0.0, -1.0), Vec2::new(1.0, 1.0), Vec2::new(-1.0, 0.0)];
        for w in want {
            assert!(p.vertices().iter().any(|v| (v - w).norm() < 1e-12));
        }
    }

    #[test]
    fn j_convention() {
        assert_eq!(apply_j(&Vec2::new(1.0, 0.0)), Vec2::new(0.0, -1.0));
        let s3 = 3f64.sqrt();
        let d = ConvexPolygon::from_coords(&[
            [-0.5, -0.5 / s3],
            [0.5, -0.5 / s3],
            [0.0, 1.0 / s3],
        ])
        .unwrap();
        let jd = rotate_j(&d);
        let want = [
            Vec2::new(-0.5 / s3, 0.5),
            Vec2::new(-0.5 / s3, -0.5),
            Vec2::new(1.0 / s3, 0.0),
        ];
        for (v, w) in jd.vertices().iter().zip(want.iter()) {
            assert!((v - w).norm() < 1e-15);
        }
        let jj = rotate_j(&jd);
        for (v, w) in jj.vertices().iter().zip(d.vertices()) {
            assert!((v + w).norm() < 1e-15);
        }
    }

    #[test]
    fn normal_cones() {
        let c = normal_cone(&sq(), &Vec2::new(0.5, 0.0)).unwrap();
        assert!(c.is_ray());
        assert!((c.ray_lo - Vec2::new(0.0, -1.0)).norm() < 1e-15);
        let c = normal_cone(&sq(), &Vec2::new(0.0, 0.0)).unwrap();
        assert!((c.ray_lo - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((c.ray_hi - Vec2::new(0.0, -1.0)).norm() < 1e-15);
        assert!((c.angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(normal_cone(&sq(), &Vec2::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn chords() {
        assert!((chord_length(&sq(), &Vec2::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((chord_length(&sq(), &Vec2::new(1.0, 1.0)) - 2f64.sqrt()).abs() < 1e-15);
        let t = ConvexPolygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((chord_length(&t, &Vec2::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intersections() {
        let s = sq();
        let same = intersect_pair(&s, &s).unwrap();
        assert!((same.area() - 1.0).abs() < 1e-12);
        assert!(intersect_pair(&s, &s.translate(&Vec2::new(3.0, 0.0))).is_none());
        let half = intersect_pair(&s, &s.translate(&Vec2::new(0.5, 0.0))).unwrap();
        assert!((half.area() - 0.5).abs() < 1e-12);
        let (lo, hi) = half.bbox();
        assert!((lo - Vec2::new(0.5, 0.0)).norm() < 1e-12);
        assert!((hi - Vec2::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn fitting_examples() {
        let s = sq();
        let tiny = ClosedPolygonalCurve::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.01, 0.0),
            Vec2::new(0.0, 0.005),
        ])
        .unwrap();
        let f = fits_by_translation(&tiny, &s);
        assert!(f.fits);
        let w = f.witness.unwrap();
        for v in tiny.vertices() {
            assert!(s.contains(&(v + w), 0.0));
        }
        let long = ClosedPolygonalCurve::new(vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)]).unwrap();
        assert!(!fits_by_translation(&long, &s).fits);
    }

    #[test]
    fn curve_rejects_collinear() {
        let c = ClosedPolygonalCurve::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
        ]);
        assert_eq!(c, Err(GeomError::BadCurve));
    }
}
