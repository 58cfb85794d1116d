//! JSON, CSV and SVG formats for polygons, results and trajectories.

use crate::capacity::{CapacityResult, SystolicReport};
use crate::covering::{CoveringResult, SweepRow};
use crate::dynamics::BilliardTrajectory;
use crate::geom2d::{ConvexPolygon, GeomError, Vec2};
use serde::Serialize;
use serde_json::{json, Value};
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> IoError {
    IoError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

/// Compact JSON with every float printed to 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            w.write_all(b"0.0")
        } else {
            write!(w, "{value:.16e}")
        }
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String, IoError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

fn pt(v: &Vec2) -> [f64; 2] {
    [v.x, v.y]
}

pub fn polygon_value(p: &ConvexPolygon) -> Value {
    json!({ "vertices": p.coords() })
}

pub fn polygon_to_json(p: &ConvexPolygon) -> String {
    to_json_string(&polygon_value(p)).expect("polygon serializes")
}

fn parse_point(v: &Value, field: &str) -> Result<Vec2, IoError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| field_err(field, "expected [x, y]"))?;
    let num = |i: usize| {
        arr[i]
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| field_err(format!("{field}[{i}]"), "expected a finite number"))
    };
    Ok(Vec2::new(num(0)?, num(1)?))
}

pub fn parse_points(v: &Value, field: &str) -> Result<Vec<Vec2>, IoError> {
    v.as_array()
        .ok_or_else(|| field_err(field, "expected an array of points"))?
        .iter()
        .enumerate()
        .map(|(i, p)| parse_point(p, &format!("{field}[{i}]")))
        .collect()
}

pub fn polygon_from_value(v: &Value) -> Result<ConvexPolygon, IoError> {
    let verts = v
        .get("vertices")
        .ok_or_else(|| field_err("vertices", "missing"))?;
    let pts = parse_points(verts, "vertices")?;
    ConvexPolygon::from_vertices(&pts).map_err(|e| field_err("vertices", e.to_string()))
}

pub fn polygon_from_json(s: &str) -> Result<ConvexPolygon, IoError> {
    polygon_from_value(&serde_json::from_str(s)?)
}

pub fn capacity_value(r: &CapacityResult) -> Value {
    json!({
        "value": r.value,
        "dual_value": r.dual_value,
        "solver": r.solver,
        "curve": r.optimizer_curve.coords(),
        "resolution": r.grid_resolution,
    })
}

pub fn systolic_value(r: &SystolicReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn covering_value(r: &CoveringResult) -> Value {
    serde_json::to_value(r).expect("result serializes")
}

pub fn trajectory_value(t: &BilliardTrajectory) -> Value {
    let states: Vec<Value> = t
        .states
        .iter()
        .map(|s| json!({ "q": pt(&s.q), "p": pt(&s.p) }))
        .collect();
    json!({ "states": states, "closed": t.closed, "length_T": t.length_t })
}

pub const SWEEP_HEADER: &str = "a1,a2,lambda1,lambda2,best_area,gap,flagged";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            r.a1, r.a2, r.lambda1, r.lambda2, r.best_area, r.gap, r.flagged
        ));
    }
    out
}

pub const SVG_SIZE: f64 = 800.0;
const PANEL_TOP: f64 = 80.0;
const MARGIN: f64 = 20.0;

/// K with the q-path on the left, T with the p-path on the right, both at
/// one common scale.
pub fn render_svg(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    q_path: &[Vec2],
    p_path: &[Vec2],
) -> String {
    let panel_w = SVG_SIZE / 2.0 - 2.0 * MARGIN;
    let panel_h = SVG_SIZE - PANEL_TOP - MARGIN;
    let ext = |p: &ConvexPolygon| {
        let (lo, hi) = p.bbox();
        (lo, hi, (hi - lo).x.max(1e-12), (hi - lo).y.max(1e-12))
    };
    let (klo, khi, kw, kh) = ext(k);
    let (tlo, thi, tw, th) = ext(t);
    let scale = (panel_w / kw.max(tw)).min(panel_h / kh.max(th));
    let view = |v: &Vec2, lo: &Vec2, hi: &Vec2, x0: f64| {
        let cx = x0 + MARGIN + panel_w / 2.0 + (v.x - (lo.x + hi.x) / 2.0) * scale;
        let cy = PANEL_TOP + panel_h / 2.0 - (v.y - (lo.y + hi.y) / 2.0) * scale;
        format!("{cx:.3},{cy:.3}")
    };
    let poly = |pts: &[Vec2], lo: &Vec2, hi: &Vec2, x0: f64, color: &str, closed: bool| {
        let tag = if closed { "polygon" } else { "polyline" };
        let s: Vec<String> = pts.iter().map(|v| view(v, lo, hi, x0)).collect();
        format!(
            "<{tag} points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            s.join(" ")
        )
    };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SVG_SIZE
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let legend = [("black", "K"), ("red", "q-path"), ("gray", "T"), ("blue", "p-path")];
    for (i, (color, label)) in legend.iter().enumerate() {
        let x = 20.0 + 190.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"30\" x2=\"{}\" y2=\"30\" stroke=\"{color}\" stroke-width=\"3\"/>\
<text x=\"{}\" y=\"35\" font-family=\"sans-serif\" font-size=\"16\">{label}</text>\n",
            x + 30.0,
            x + 40.0
        ));
    }
    out.push_str(&poly(k.vertices(), &klo, &khi, 0.0, "black", true));
    if q_path.len() >= 2 {
        out.push_str(&poly(q_path, &klo, &khi, 0.0, "red", false));
    }
    let x0 = SVG_SIZE / 2.0;
    out.push_str(&poly(t.vertices(), &tlo, &thi, x0, "gray", true));
    if p_path.len() >= 2 {
        out.push_str(&poly(p_path, &tlo, &thi, x0, "blue", false));
    }
    out.push_str("</svg>\n");
    out
}
