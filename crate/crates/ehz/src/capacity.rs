//! EHZ capacity of a Lagrangian product K x T of convex polygons.
//!
//! The capacity is the least T-length over closed polygonal curves with at
//! most three vertices that cannot be translated into the interior of K.
//! Two-vertex curves are handled exactly by a direction search; three-vertex
//! curves by a boundary grid followed by a pattern-search polish.

use crate::geom2d::{
    chord_with_endpoints, cross, fits_by_translation, support_function, ClosedPolygonalCurve,
    ConvexPolygon, GeomError, Vec2, EPS_BOUNDARY, EPS_PRED,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

pub const DEFAULT_RESOLUTION: usize = 720;
pub const TWO_BOUNCE_GRID: usize = 3600;
/// Relative tolerance between primal and dual values on oracle runs.
pub const DUALITY_TOL: f64 = 1e-3;
const SPAN_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("no feasible three-vertex curve at resolution {0}")]
    NoFeasibleTriple(usize),
    #[error("resolution {0} is below the minimum of 60")]
    ResolutionTooSmall(usize),
    #[error("second factor is not a trapezoid")]
    QNotTrapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    TwoBounceExact,
    ThreeBounceOracle,
    Combined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    pub value: f64,
    pub optimizer_curve: ClosedPolygonalCurve,
    pub solver: Solver,
    pub dual_value: f64,
    pub grid_resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystolicReport {
    pub capacity: f64,
    pub volume_product: f64,
    pub ratio: f64,
    pub is_equality: bool,
}

/// T-length of a closed curve: sum of h_T over its edge vectors.
pub fn ell_length(q: &ClosedPolygonalCurve, t: &ConvexPolygon) -> f64 {
    cycle_length(q.vertices(), t)
}

pub fn cycle_length(pts: &[Vec2], t: &ConvexPolygon) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|j| support_function(t, &(pts[(j + 1) % n] - pts[j])))
        .sum()
}

fn unit(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

fn two_bounce_objective(k: &ConvexPolygon, t: &ConvexPolygon, theta: f64) -> f64 {
    let u = unit(theta);
    let (c, _, _) = chord_with_endpoints(k, &u);
    c * (support_function(t, &u) + support_function(t, &(-u)))
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > 1e-10 * (1.0 + a.abs().max(b.abs())) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimum of chord_K(u) * (h_T(u) + h_T(-u)) over unit u.
///
/// The objective is a ratio of two linear functions between consecutive
/// breakpoints, so the minimum sits on a breakpoint; golden-section search
/// around the best cells only confirms it.
fn two_bounce_core(k: &ConvexPolygon, t: &ConvexPolygon) -> (f64, ClosedPolygonalCurve) {
    let mut angles: Vec<f64> = (0..TWO_BOUNCE_GRID)
        .map(|i| PI * i as f64 / TWO_BOUNCE_GRID as f64)
        .collect();
    let kv = k.vertices();
    for (i, a) in kv.iter().enumerate() {
        for b in &kv[i + 1..] {
            let d = b - a;
            angles.push(d.y.atan2(d.x).rem_euclid(PI));
        }
    }
    for i in 0..t.len() {
        let n = t.outward_normal(i);
        angles.push(n.y.atan2(n.x).rem_euclid(PI));
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let vals: Vec<f64> = angles
        .iter()
        .map(|&th| two_bounce_objective(k, t, th))
        .collect();
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let m = angles.len();
    let (mut best_th, mut best_v) = (angles[order[0]], vals[order[0]]);
    for &i in order.iter().take(5) {
        let lo = if i == 0 { angles[m - 1] - PI } else { angles[i - 1] };
        let hi = if i + 1 == m { angles[0] + PI } else { angles[i + 1] };
        let (th, v) = golden_min(|x| two_bounce_objective(k, t, x), lo, hi);
        if v < best_v {
            best_v = v;
            best_th = th;
        }
    }
    let (_, a, b) = chord_with_endpoints(k, &unit(best_th));
    let curve = ClosedPolygonalCurve::new(vec![a, b]).expect("chord of a solid polygon");
    (best_v, curve)
}

/// Exact minimum over two-vertex curves.
pub fn capacity_two_bounce(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
) -> Result<CapacityResult, CapacityError> {
    k.require_solid()?;
    t.require_solid()?;
    let (value, curve) = two_bounce_core(k, t);
    let (dual_value, _) = two_bounce_core(t, k);
    Ok(CapacityResult {
        value,
        optimizer_curve: curve,
        solver: Solver::TwoBounceExact,
        dual_value,
        grid_resolution: TWO_BOUNCE_GRID,
    })
}

/// Normal cone of a boundary sample as an angular arc.
#[derive(Clone, Copy, Debug)]
struct Arc {
    lo: f64,
    width: f64,
}

/// True when the arcs leave no open half-circle uncovered.
fn arcs_span(arcs: &[Arc]) -> bool {
    let mut iv: [(f64, f64); 6] = [(0.0, 0.0); 6];
    let mut n = 0;
    for a in arcs {
        let lo = a.lo.rem_euclid(TAU);
        let hi = lo + a.width;
        if hi > TAU {
            iv[n] = (lo, TAU);
            iv[n + 1] = (0.0, hi - TAU);
            n += 2;
        } else {
            iv[n] = (lo, hi);
            n += 1;
        }
    }
    let iv = &mut iv[..n];
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gap: f64 = 0.0;
    let mut end = iv[0].1;
    for w in iv.iter().skip(1) {
        if w.0 > end {
            gap = gap.max(w.0 - end);
        }
        end = end.max(w.1);
    }
    gap = gap.max(iv[0].0 + TAU - end);
    gap <= PI + SPAN_MARGIN
}

/// Boundary of K with vertex-aware cone lookup.
struct Boundary<'a> {
    k: &'a ConvexPolygon,
    per: f64,
    vparams: Vec<f64>,
    normal_angles: Vec<f64>,
}

impl<'a> Boundary<'a> {
    fn new(k: &'a ConvexPolygon) -> Self {
        let normal_angles = (0..k.len())
            .map(|i| {
                let n = k.outward_normal(i);
                n.y.atan2(n.x)
            })
            .collect();
        Self {
            k,
            per: k.perimeter(),
            vparams: k.vertex_params(),
            normal_angles,
        }
    }

    fn arc(&self, s: f64) -> Arc {
        self.site_arc(s).1
    }

    /// Site id (edge e, or n + i for vertex i) and normal cone of a sample.
    fn site_arc(&self, s: f64) -> (usize, Arc) {
        let s = s.rem_euclid(self.per);
        let n = self.vparams.len();
        for (i, &v) in self.vparams.iter().enumerate() {
            let d = (s - v).abs().min(self.per - (s - v).abs());
            if d <= EPS_BOUNDARY {
                let lo = self.normal_angles[(i + n - 1) % n];
                let hi = self.normal_angles[i];
                let arc = Arc {
                    lo,
                    width: (hi - lo).rem_euclid(TAU),
                };
                return (n + i, arc);
            }
        }
        let (e, _) = self.k.locate_param(s);
        let arc = Arc {
            lo: self.normal_angles[e],
            width: 0.0,
        };
        (e, arc)
    }

    fn point(&self, s: f64) -> Vec2 {
        self.k.boundary_point(s)
    }
}

/// Spanning test for sample triples. Samples are grouped into sites (edge
/// interiors and vertices); for small polygons the answer is tabulated per
/// site triple.
struct SpanTable {
    site: Vec<usize>,
    arcs: Vec<Arc>,
    n_sites: usize,
    table: Option<Vec<bool>>,
}

const SPAN_TABLE_MAX_SITES: usize = 128;

impl SpanTable {
    fn new(bd: &Boundary, params: &[f64]) -> Self {
        let m = bd.vparams.len();
        let n_sites = 2 * m;
        let mut site_arcs = vec![Arc { lo: 0.0, width: 0.0 }; n_sites];
        let mut site = Vec::with_capacity(params.len());
        for &s in params {
            let (id, a) = bd.site_arc(s);
            site_arcs[id] = a;
            site.push(id);
        }
        let table = (n_sites <= SPAN_TABLE_MAX_SITES).then(|| {
            let mut t = vec![false; n_sites * n_sites * n_sites];
            for a in 0..n_sites {
                for b in 0..n_sites {
                    for c in 0..n_sites {
                        t[(a * n_sites + b) * n_sites + c] =
                            arcs_span(&[site_arcs[a], site_arcs[b], site_arcs[c]]);
                    }
                }
            }
            t
        });
        let arcs = site.iter().map(|&id| site_arcs[id]).collect();
        Self {
            site,
            arcs,
            n_sites,
            table,
        }
    }

    #[inline]
    fn spans(&self, i: usize, j: usize, k: usize) -> bool {
        match &self.table {
            Some(t) => {
                let n = self.n_sites;
                t[(self.site[i] * n + self.site[j]) * n + self.site[k]]
            }
            None => arcs_span(&[self.arcs[i], self.arcs[j], self.arcs[k]]),
        }
    }
}

fn collinear(a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    let (u, v) = (b - a, c - a);
    let scale = u.norm().max(v.norm()).max((c - b).norm());
    cross(&u, &v).abs() <= EPS_PRED * scale * scale
        || ClosedPolygonalCurve::new(vec![*a, *b, *c]).is_err()
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    len: f64,
    idx: [usize; 3],
}

fn cand_cmp(a: &Candidate, b: &Candidate) -> Ordering {
    a.len.total_cmp(&b.len).then(a.idx.cmp(&b.idx))
}

/// Arc-length sample positions: a uniform grid merged with the vertices.
fn sample_params(k: &ConvexPolygon, resolution: usize) -> Vec<f64> {
    let per = k.perimeter();
    let vparams = k.vertex_params();
    let mut params: Vec<f64> = (0..resolution)
        .map(|i| per * i as f64 / resolution as f64)
        .filter(|s| {
            vparams
                .iter()
                .all(|v| (s - v).abs() > EPS_PRED * per && (per - (s - v).abs()) > EPS_PRED * per)
        })
        .collect();
    params.extend(vparams);
    params.sort_by(f64::total_cmp);
    params
}

fn three_bounce_core(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    resolution: usize,
) -> Result<(f64, ClosedPolygonalCurve), CapacityError> {
    let bd = Boundary::new(k);
    let params = sample_params(k, resolution);
    let n = params.len();
    let pts: Vec<Vec2> = params.iter().map(|&s| bd.point(s)).collect();
    let span = SpanTable::new(&bd, &params);
    // h[i][j] = h_T(q_j - q_i), ht = transpose, both row-major
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                h[i * n + j] = support_function(t, &(pts[j] - pts[i]));
            }
        }
    }
    let mut ht = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            ht[i * n + j] = h[j * n + i];
        }
    }
    let per_row: Vec<Option<Candidate>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<Candidate> = None;
            let hi_row = &h[i * n..(i + 1) * n];
            let hti_row = &ht[i * n..(i + 1) * n];
            for j in i + 1..n {
                let hij = hi_row[j];
                let hji = hti_row[j];
                let hj_row = &h[j * n..(j + 1) * n];
                let htj_row = &ht[j * n..(j + 1) * n];
                for kk in j + 1..n {
                    let bound = best.map_or(f64::INFINITY, |b| b.len);
                    // cycle i -> j -> kk and its reverse i -> kk -> j
                    let l_fwd = hij + hj_row[kk] + hti_row[kk];
                    let l_rev = hi_row[kk] + htj_row[kk] + hji;
                    if l_fwd > bound && l_rev > bound {
                        continue;
                    }
                    if !span.spans(i, j, kk) || collinear(&pts[i], &pts[j], &pts[kk]) {
                        continue;
                    }
                    let cands = [
                        Candidate {
                            len: l_fwd,
                            idx: [i, j, kk],
                        },
                        Candidate {
                            len: l_rev,
                            idx: [i, kk, j],
                        },
                    ];
                    for c in cands {
                        if best.map_or(true, |b| cand_cmp(&c, &b) == Ordering::Less) {
                            best = Some(c);
                        }
                    }
                }
            }
            best
        })
        .collect();
    let mut cands: Vec<Candidate> = per_row.into_iter().flatten().collect();
    cands.sort_by(cand_cmp);
    let mut seeds: Vec<(Candidate, ClosedPolygonalCurve)> = Vec::new();
    for c in cands {
        let curve = match ClosedPolygonalCurve::new(c.idx.iter().map(|&i| pts[i]).collect()) {
            Ok(q) => q,
            Err(_) => continue,
        };
        if !fits_by_translation(&curve, k).fits {
            seeds.push((c, curve));
            if seeds.len() == 5 {
                break;
            }
        }
    }
    if seeds.is_empty() {
        return Err(CapacityError::NoFeasibleTriple(resolution));
    }
    let step = bd.per / resolution as f64;
    let mut best: Option<(f64, ClosedPolygonalCurve)> = None;
    for (c, curve) in seeds {
        let s0 = [params[c.idx[0]], params[c.idx[1]], params[c.idx[2]]];
        let (len, q) = match refine(&bd, t, s0, step) {
            Some((len, q)) if len <= c.len => (len, q),
            _ => (c.len, curve),
        };
        if best.as_ref().map_or(true, |b| len < b.0) {
            best = Some((len, q));
        }
    }
    Ok(best.expect("at least one seed"))
}

const DIRS: [[i8; 3]; 26] = {
    let mut out = [[0i8; 3]; 26];
    let mut n = 0;
    let mut a = -1;
    while a <= 1 {
        let mut b = -1;
        while b <= 1 {
            let mut c = -1;
            while c <= 1 {
                if !(a == 0 && b == 0 && c == 0) {
                    out[n] = [a, b, c];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

/// Pattern search over the three arc-length parameters, step halving from
/// one grid cell to 1e-9, keeping the normal cones spanning.
fn refine(
    bd: &Boundary,
    t: &ConvexPolygon,
    s0: [f64; 3],
    step: f64,
) -> Option<(f64, ClosedPolygonalCurve)> {
    let eval = |s: &[f64; 3]| -> Option<f64> {
        let p = [bd.point(s[0]), bd.point(s[1]), bd.point(s[2])];
        if collinear(&p[0], &p[1], &p[2]) {
            return None;
        }
        if !arcs_span(&[bd.arc(s[0]), bd.arc(s[1]), bd.arc(s[2])]) {
            return None;
        }
        Some(cycle_length(&p, t))
    };
    let mut s = s0;
    let mut cur = eval(&s)?;
    let mut h = step;
    let mut iters = 0;
    while h >= 1e-9 && iters < 200_000 {
        iters += 1;
        let mut moved = false;
        for d in DIRS.iter() {
            let cand = [
                s[0] + h * d[0] as f64,
                s[1] + h * d[1] as f64,
                s[2] + h * d[2] as f64,
            ];
            if let Some(v) = eval(&cand) {
                if v < cur - 1e-15 * cur.abs().max(1.0) {
                    s = cand;
                    cur = v;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    let q = ClosedPolygonalCurve::new(vec![bd.point(s[0]), bd.point(s[1]), bd.point(s[2])]).ok()?;
    if fits_by_translation(&q, bd.k).fits {
        return None;
    }
    Some((cur, q))
}

/// Primal half of the oracle: best three-vertex curve found and its length.
pub fn three_bounce_value(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    resolution: usize,
) -> Result<(f64, ClosedPolygonalCurve), CapacityError> {
    k.require_solid()?;
    t.require_solid()?;
    if resolution < 60 {
        return Err(CapacityError::ResolutionTooSmall(resolution));
    }
    three_bounce_core(k, t, resolution)
}

/// Grid-plus-polish upper bound for the three-vertex minimum.
pub fn capacity_three_bounce_oracle(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    resolution: usize,
) -> Result<CapacityResult, CapacityError> {
    k.require_solid()?;
    t.require_solid()?;
    if resolution < 60 {
        return Err(CapacityError::ResolutionTooSmall(resolution));
    }
    let (value, curve) = three_bounce_core(k, t, resolution)?;
    let (dual_value, _) = three_bounce_core(t, k, resolution)?;
    Ok(CapacityResult {
        value,
        optimizer_curve: curve,
        solver: Solver::ThreeBounceOracle,
        dual_value,
        grid_resolution: resolution,
    })
}

fn combined_value(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    resolution: usize,
) -> Result<(f64, ClosedPolygonalCurve, Solver), CapacityError> {
    let (v2, c2) = two_bounce_core(k, t);
    let (v3, c3) = three_bounce_core(k, t, resolution)?;
    Ok(if (v2 - v3).abs() <= 1e-9 * v2 {
        (v2.min(v3), c2, Solver::Combined)
    } else if v2 < v3 {
        (v2, c2, Solver::TwoBounceExact)
    } else {
        (v3, c3, Solver::ThreeBounceOracle)
    })
}

pub fn ehz_capacity(k: &ConvexPolygon, t: &ConvexPolygon) -> Result<CapacityResult, CapacityError> {
    ehz_capacity_with(k, t, DEFAULT_RESOLUTION)
}

/// Minimum of both solvers; `dual_value` repeats the computation with the
/// factors swapped.
pub fn ehz_capacity_with(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    resolution: usize,
) -> Result<CapacityResult, CapacityError> {
    k.require_solid()?;
    t.require_solid()?;
    if resolution < 60 {
        return Err(CapacityError::ResolutionTooSmall(resolution));
    }
    let (value, curve, solver) = combined_value(k, t, resolution)?;
    let (dual_value, _, _) = combined_value(t, k, resolution)?;
    Ok(CapacityResult {
        value,
        optimizer_curve: curve,
        solver,
        dual_value,
        grid_resolution: resolution,
    })
}

pub fn systolic_from_value(capacity: f64, k: &ConvexPolygon, t: &ConvexPolygon) -> SystolicReport {
    let volume_product = k.area() * t.area();
    let ratio = capacity * capacity / (2.0 * volume_product);
    SystolicReport {
        capacity,
        volume_product,
        ratio,
        is_equality: (ratio - 1.0).abs() <= 1e-6,
    }
}

pub fn systolic_report(k: &ConvexPolygon, t: &ConvexPolygon) -> Result<SystolicReport, CapacityError> {
    let c = ehz_capacity(k, t)?;
    Ok(systolic_from_value(c.value, k, t))
}

/// Triangles count as trapezoids with a collapsed side.
pub fn is_trapezoid(q: &ConvexPolygon) -> bool {
    if q.is_degenerate() {
        return false;
    }
    match q.len() {
        3 => true,
        4 => {
            let d: Vec<Vec2> = (0..4)
                .map(|i| {
                    let (a, b) = q.edge(i);
                    (b - a).normalize()
                })
                .collect();
            cross(&d[0], &d[2]).abs() <= 1e-9 || cross(&d[1], &d[3]).abs() <= 1e-9
        }
        _ => false,
    }
}

/// Checks c(K x Q)^2 <= 2 vol(K) with slack 1e-3, after scaling Q to unit area.
pub fn worm_inequality_check(k: &ConvexPolygon, q: &ConvexPolygon) -> Result<bool, CapacityError> {
    k.require_solid()?;
    if !is_trapezoid(q) {
        return Err(CapacityError::QNotTrapezoid);
    }
    let qn = q.scale(1.0 / q.area().sqrt());
    let c = ehz_capacity(k, &qn)?.value;
    Ok(c * c <= 2.0 * k.area() * (1.0 + 1e-3))
}
