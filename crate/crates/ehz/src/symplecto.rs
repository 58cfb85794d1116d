//! Affine maps on the plane and the product transforms phi x (phi^T)^{-1},
//! plus the explicit normal forms for triangle and quadrilateral products.

use crate::equality_cases::{
    diamond, diamond_scaled, equality_partner, quadrilateral_from_params, rotation, t_star,
    unit_square, EqualityError, QuadParams,
};
use crate::geom2d::{j_matrix, segment_distance, ConvexPolygon, Mat2, Vec2, EPS_BOUNDARY};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymplectoError {
    #[error("matrix is singular (det = {0})")]
    SingularMatrix(f64),
    #[error("t = ({0}, {1}) is not on the boundary of -J(Delta)")]
    TNotOnEdge(f64, f64),
    #[error(transparent)]
    Param(#[from] EqualityError),
}

/// x -> matrix * x + shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MapRecord", from = "MapRecord")]
pub struct AffineMap2 {
    pub matrix: Mat2,
    pub shift: Vec2,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MapRecord {
    matrix: [[f64; 2]; 2],
    shift: [f64; 2],
}

impl From<AffineMap2> for MapRecord {
    fn from(m: AffineMap2) -> Self {
        let a = m.matrix;
        MapRecord {
            matrix: [[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]],
            shift: [m.shift.x, m.shift.y],
        }
    }
}

impl From<MapRecord> for AffineMap2 {
    fn from(r: MapRecord) -> Self {
        AffineMap2 {
            matrix: Mat2::new(r.matrix[0][0], r.matrix[0][1], r.matrix[1][0], r.matrix[1][1]),
            shift: Vec2::new(r.shift[0], r.shift[1]),
        }
    }
}

impl AffineMap2 {
    pub fn new(matrix: Mat2, shift: Vec2) -> Self {
        Self { matrix, shift }
    }

    pub fn identity() -> Self {
        Self::new(Mat2::identity(), Vec2::zeros())
    }

    pub fn linear(matrix: Mat2) -> Self {
        Self::new(matrix, Vec2::zeros())
    }

    pub fn translation(shift: Vec2) -> Self {
        Self::new(Mat2::identity(), shift)
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, x: &Vec2) -> Vec2 {
        self.matrix * x + self.shift
    }

    pub fn apply_polygon(&self, p: &ConvexPolygon) -> ConvexPolygon {
        p.map_affine(&self.matrix, &self.shift)
    }

    /// self after other.
    pub fn compose(&self, other: &AffineMap2) -> AffineMap2 {
        AffineMap2::new(self.matrix * other.matrix, self.matrix * other.shift + self.shift)
    }

    pub fn inverse(&self) -> Result<AffineMap2, SymplectoError> {
        let inv = self.checked_inverse_matrix()?;
        Ok(AffineMap2::new(inv, -(inv * self.shift)))
    }

    fn checked_inverse_matrix(&self) -> Result<Mat2, SymplectoError> {
        let d = self.det();
        if d.abs() <= SINGULAR_TOL {
            return Err(SymplectoError::SingularMatrix(d));
        }
        self.matrix
            .try_inverse()
            .ok_or(SymplectoError::SingularMatrix(d))
    }

    /// The linear part (M^T)^{-1} acting on the momentum factor.
    pub fn dual_linear(&self) -> Result<AffineMap2, SymplectoError> {
        Ok(AffineMap2::linear(self.checked_inverse_matrix()?.transpose()))
    }
}

/// Composes a chain applied left to right (first element acts first).
pub fn compose_chain(chain: &[AffineMap2]) -> AffineMap2 {
    chain
        .iter()
        .fold(AffineMap2::identity(), |acc, m| m.compose(&acc))
}

/// Inverse chain, also applied left to right.
pub fn inverse_chain(chain: &[AffineMap2]) -> Result<Vec<AffineMap2>, SymplectoError> {
    chain.iter().rev().map(|m| m.inverse()).collect()
}

/// (phi(K), (phi^T)^{-1}(T) + y_shift).
pub fn product_transform(
    phi: &AffineMap2,
    y_shift: &Vec2,
    k: &ConvexPolygon,
    t: &ConvexPolygon,
) -> Result<(ConvexPolygon, ConvexPolygon), SymplectoError> {
    let dual = phi.dual_linear()?;
    Ok((phi.apply_polygon(k), dual.apply_polygon(t).translate(y_shift)))
}

/// M^T J M = det(M) J, entrywise to 1e-12.
pub fn verify_det_identity(phi: &AffineMap2) -> bool {
    let j = j_matrix();
    let m = phi.matrix;
    let lhs = m.transpose() * j * m;
    let rhs = j * m.determinant();
    (lhs - rhs).iter().all(|e| e.abs() <= 1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallNormalForm {
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
    pub radius: f64,
    pub volume: f64,
}

impl BallNormalForm {
    pub fn new(a: f64, a1: f64, a2: f64) -> Self {
        Self {
            a,
            a1,
            a2,
            radius: (a / std::f64::consts::PI).sqrt(),
            volume: a * a / 2.0,
        }
    }
}

/// Max over both vertex sets of the distance to the nearest vertex of the other.
pub fn vertex_residual(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let one = |a: &ConvexPolygon, b: &ConvexPolygon| {
        a.vertices()
            .iter()
            .map(|v| {
                b.vertices()
                    .iter()
                    .map(|w| (v - w).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one(p, q).max(one(q, p))
}

fn shift_to_origin(linear: Mat2, poly: &ConvexPolygon) -> AffineMap2 {
    let (lo, _) = poly.map_linear(&linear).bbox();
    AffineMap2::new(linear, -lo)
}

/// The fixed triangle with centroid at the origin and unit side.
pub fn standard_triangle() -> ConvexPolygon {
    crate::equality_cases::standard_triangle()
}

/// Vertices v1, v2, v3 of -J(standard triangle); edges are [v1,v2], [v2,v3], [v3,v1].
pub fn minus_j_standard_vertices() -> [Vec2; 3] {
    let s3 = 3f64.sqrt();
    [
        Vec2::new(1.0 / (2.0 * s3), -0.5),
        Vec2::new(1.0 / (2.0 * s3), 0.5),
        Vec2::new(-1.0 / s3, 0.0),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleNormalForm {
    /// 1, 2 or 3.
    pub edge: usize,
    pub t: Vec2,
    pub matrix: Mat2,
    pub x_map: AffineMap2,
    pub y_map: AffineMap2,
    pub ball: BallNormalForm,
}

impl TriangleNormalForm {
    pub fn target_k(&self) -> ConvexPolygon {
        diamond_scaled(self.ball.a, self.ball.a1, self.ball.a2).expect("valid targets")
    }

    /// Vertex residuals of x_map(Delta) vs the diamond and y_map(T*) vs the square.
    pub fn residuals(&self) -> Result<(f64, f64), SymplectoError> {
        let k = self.x_map.apply_polygon(&standard_triangle());
        let spec = t_star(&standard_triangle(), &self.t)?;
        let t = self.y_map.apply_polygon(&spec.hull);
        Ok((
            vertex_residual(&k, &self.target_k()),
            vertex_residual(&t, &unit_square()),
        ))
    }
}

/// Nearest edge of -J(boundary of the standard triangle), lowest index on ties.
pub fn select_edge(t: &Vec2) -> Result<usize, SymplectoError> {
    let v = minus_j_standard_vertices();
    let d: Vec<f64> = (0..3)
        .map(|i| segment_distance(t, &v[i], &v[(i + 1) % 3]))
        .collect();
    let best = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if best > EPS_BOUNDARY {
        return Err(SymplectoError::TNotOnEdge(t.x, t.y));
    }
    let i = d.iter().position(|&x| x <= best + EPS_BOUNDARY).unwrap();
    Ok(i + 1)
}

/// Matrix A_t and diamond parameters (a1, a2) for the given edge.
pub fn triangle_normal_matrix(edge: usize, t: &Vec2) -> (Mat2, f64, f64) {
    let s3 = 3f64.sqrt();
    let (t1, t2) = (t.x, t.y);
    match edge {
        1 => (
            Mat2::new(s3 / 2.0, t2, 0.0, 1.0),
            s3 / 4.0 + s3 / 2.0 * t2,
            0.0,
        ),
        2 => (
            Mat2::new(s3 / 2.0, 0.5, t1 - 1.0 / (2.0 * s3), 5.0 / 6.0 + t1 / s3),
            s3 / 2.0,
            1.0 / (2.0 * s3) - t1,
        ),
        3 => (
            Mat2::new(-t1 + 1.0 / (2.0 * s3), 5.0 / 6.0 + t1 / s3, -s3 / 2.0, 0.5),
            -t1 + 1.0 / (2.0 * s3),
            s3 / 2.0,
        ),
        _ => panic!("edge index must be 1, 2 or 3"),
    }
}

pub fn triangle_normal_form(t: &Vec2) -> Result<TriangleNormalForm, SymplectoError> {
    let edge = select_edge(t)?;
    let (a_t, a1, a2) = triangle_normal_matrix(edge, t);
    let a = 3f64.sqrt() / 2.0;
    // clamp rounding at the edge ends so the diamond constructor accepts them
    let a1 = a1.clamp(0.0, a);
    let a2 = a2.clamp(0.0, a);
    let x_map = shift_to_origin(a_t, &standard_triangle());
    let dual = AffineMap2::new(a_t, Vec2::zeros()).dual_linear()?;
    let spec = t_star(&standard_triangle(), t)?;
    let y_map = shift_to_origin(dual.matrix, &spec.hull);
    Ok(TriangleNormalForm {
        edge,
        t: *t,
        matrix: a_t,
        x_map,
        y_map,
        ball: BallNormalForm::new(a, a1, a2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadNormalForm {
    pub x_chain: Vec<AffineMap2>,
    pub y_chain: Vec<AffineMap2>,
    pub ball: BallNormalForm,
}

impl QuadNormalForm {
    /// Residuals of the chain images against ◇(1,a1,a2) and the unit square.
    pub fn residuals(&self, p: &QuadParams) -> Result<(f64, f64), SymplectoError> {
        let q = quadrilateral_from_params(p)?;
        let part = equality_partner(p)?;
        let qx = compose_chain(&self.x_chain).apply_polygon(&q);
        let py = compose_chain(&self.y_chain).apply_polygon(&part);
        Ok((
            vertex_residual(&qx, &diamond(p.a1, p.a2)?),
            vertex_residual(&py, &unit_square()),
        ))
    }
}

/// Chain taking Q x A(unit square) to ◇(1,a1,a2) x unit square.
pub fn quadrilateral_normal_form(p: &QuadParams) -> Result<QuadNormalForm, SymplectoError> {
    p.validate()?;
    let shear = AffineMap2::linear(p.shear_scale());
    let x_chain = vec![
        AffineMap2::translation(-p.shift()),
        AffineMap2::linear(rotation(p.beta)),
        shear.inverse()?,
        AffineMap2::translation(p.corner()),
    ];
    let y_chain = x_chain
        .iter()
        .map(|m| m.dual_linear())
        .collect::<Result<Vec<_>, _>>()?;
    let vol_q = quadrilateral_from_params(p)?.area();
    let vol_p = equality_partner(p)?.area();
    let a = (2.0 * vol_q * vol_p).sqrt();
    Ok(QuadNormalForm {
        x_chain,
        y_chain,
        ball: BallNormalForm::new(a, p.a1 * a, p.a2 * a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_identity_examples() {
        assert!(verify_det_identity(&AffineMap2::identity()));
        assert!(verify_det_identity(&AffineMap2::linear(j_matrix())));
        assert!(verify_det_identity(&AffineMap2::linear(Mat2::new(
            3.0, -4.5, 1.25, 2.0
        ))));
    }

    #[test]
    fn map_json_shape() {
        let m = AffineMap2::new(Mat2::new(1.0, 2.0, 3.0, 4.0), Vec2::new(5.0, 6.0));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"matrix":[[1.0,2.0],[3.0,4.0]],"shift":[5.0,6.0]}"#);
        let back: AffineMap2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn compose_and_inverse() {
        let a = AffineMap2::new(Mat2::new(2.0, 1.0, 0.0, 1.0), Vec2::new(1.0, -1.0));
        let b = AffineMap2::new(Mat2::new(0.0, -1.0, 1.0, 0.0), Vec2::new(0.5, 0.0));
        let x = Vec2::new(0.3, 0.7);
        assert!((a.compose(&b).apply(&x) - a.apply(&b.apply(&x))).norm() < 1e-15);
        let id = a.inverse().unwrap().compose(&a);
        assert!((id.apply(&x) - x).norm() < 1e-15);
        let chain = [a, b];
        let inv = inverse_chain(&chain).unwrap();
        let y = compose_chain(&chain).apply(&x);
        assert!((compose_chain(&inv).apply(&y) - x).norm() < 1e-14);
        assert!(AffineMap2::linear(Mat2::new(1.0, 2.0, 2.0, 4.0))
            .inverse()
            .is_err());
    }

    #[test]
    fn triangle_caption_values() {
        let s3 = 3f64.sqrt();
        let nf = triangle_normal_form(&Vec2::new(1.0 / (2.0 * s3), 0.0)).unwrap();
        assert_eq!(nf.edge, 1);
        assert!((nf.ball.a1 - s3 / 4.0).abs() < 1e-15 && nf.ball.a2 == 0.0);
        let nf = triangle_normal_form(&Vec2::new(1.0 / (2.0 * s3), -0.5)).unwrap();
        assert!(nf.ball.a1.abs() < 1e-15);
        let (rk, rt) = nf.residuals().unwrap();
        assert!(rk < 1e-12 && rt < 1e-12);
        assert!(triangle_normal_form(&Vec2::zeros()).is_err());
    }

    #[test]
    fn quad_identity_chain() {
        let p = QuadParams::identity(0.3, 0.6);
        let nf = quadrilateral_normal_form(&p).unwrap();
        let c = compose_chain(&nf.x_chain);
        assert!((c.matrix - Mat2::identity()).norm() < 1e-15 && c.shift.norm() < 1e-15);
        assert!((nf.ball.radius - (1.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }
}
