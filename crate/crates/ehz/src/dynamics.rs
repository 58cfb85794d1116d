//! Minkowski billiards on polygon pairs: the reflection step, trajectory
//! tracing, the explicit return maps for square x diamond, and the two
//! non-regular counterexamples.

use crate::capacity::{cycle_length, ehz_capacity, CapacityError};
use crate::equality_cases::diamond;
use crate::geom2d::{
    boundary_site, line_clip, support_function, BoundarySite, ClosedPolygonalCurve, ConvexPolygon,
    GeomError, Vec2, EPS_BOUNDARY,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state is not regular: {0}")]
    NonRegularState(&'static str),
    #[error("ray leaves the body immediately")]
    RayExitsImmediately,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BilliardState {
    pub q: Vec2,
    pub p: Vec2,
    pub q_param: f64,
    pub p_param: f64,
    pub regular: bool,
}

impl BilliardState {
    pub fn new(
        k: &ConvexPolygon,
        t: &ConvexPolygon,
        q: Vec2,
        p: Vec2,
    ) -> Result<Self, DynamicsError> {
        let qs = boundary_site(k, &q)?;
        let ps = boundary_site(t, &p)?;
        Ok(Self {
            q,
            p,
            q_param: k.boundary_param(&q),
            p_param: t.boundary_param(&p),
            regular: matches!(qs, BoundarySite::Edge(_)) && matches!(ps, BoundarySite::Edge(_)),
        })
    }

    fn close_to(&self, other: &BilliardState) -> f64 {
        (self.q - other.q).norm().max((self.p - other.p).norm())
    }
}

fn edge_normal(p: &ConvexPolygon, x: &Vec2, what: &'static str) -> Result<Vec2, DynamicsError> {
    match boundary_site(p, x)? {
        BoundarySite::Edge(i) => Ok(p.outward_normal(i)),
        BoundarySite::Vertex(_) => Err(DynamicsError::NonRegularState(what)),
    }
}

/// Far end of the ray x + tau u inside p.
fn exit_point(p: &ConvexPolygon, x: &Vec2, u: &Vec2) -> Result<Vec2, DynamicsError> {
    let (_, hi) = line_clip(p, x, u).ok_or(DynamicsError::RayExitsImmediately)?;
    if hi <= EPS_BOUNDARY * p.diameter() {
        return Err(DynamicsError::RayExitsImmediately);
    }
    Ok(x + u * hi)
}

pub fn reflect_step(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    s: &BilliardState,
) -> Result<BilliardState, DynamicsError> {
    let n_t = edge_normal(t, &s.p, "p at a vertex of T")?;
    let q = exit_point(k, &s.q, &n_t)?;
    let n_k = edge_normal(k, &q, "q at a vertex of K")?;
    let p = exit_point(t, &s.p, &(-n_k))?;
    BilliardState::new(k, t, q, p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilliardTrajectory {
    pub states: Vec<BilliardState>,
    pub closed: bool,
    pub bounce_count: usize,
    pub length_t: f64,
    pub length_k_dual: f64,
    pub closure_residual: f64,
}

impl BilliardTrajectory {
    pub fn q_cycle(&self) -> Vec<Vec2> {
        self.cycle_states().iter().map(|s| s.q).collect()
    }

    pub fn p_cycle(&self) -> Vec<Vec2> {
        self.cycle_states().iter().map(|s| s.p).collect()
    }

    fn cycle_states(&self) -> &[BilliardState] {
        if self.closed {
            &self.states[..self.bounce_count]
        } else {
            &self.states
        }
    }
}

/// ell_{-K} of a p-cycle: sum of h_K(p_j - p_{j+1}).
pub fn dual_length(ps: &[Vec2], k: &ConvexPolygon) -> f64 {
    let n = ps.len();
    (0..n)
        .map(|j| support_function(k, &(ps[j] - ps[(j + 1) % n])))
        .sum()
}

/// Iterates until the start state recurs or `max_steps` is reached.
pub fn trace(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    start: &BilliardState,
    max_steps: usize,
) -> Result<BilliardTrajectory, DynamicsError> {
    if !start.regular {
        return Err(DynamicsError::NonRegularState("start state"));
    }
    let mut states = vec![*start];
    let mut residual = f64::INFINITY;
    let mut closed = false;
    for _ in 0..max_steps {
        let next = reflect_step(k, t, states.last().unwrap())?;
        residual = next.close_to(start);
        states.push(next);
        if residual <= CLOSURE_TOL {
            closed = true;
            break;
        }
    }
    let bounce_count = states.len() - 1;
    let mut traj = BilliardTrajectory {
        states,
        closed,
        bounce_count,
        length_t: 0.0,
        length_k_dual: 0.0,
        closure_residual: residual,
    };
    let qs = traj.q_cycle();
    let ps = traj.p_cycle();
    if closed {
        traj.length_t = cycle_length(&qs, t);
        traj.length_k_dual = dual_length(&ps, k);
    } else {
        // open path: sum over the traversed edges only
        traj.length_t = qs.windows(2).map(|w| support_function(t, &(w[1] - w[0]))).sum();
        traj.length_k_dual = ps.windows(2).map(|w| support_function(k, &(w[0] - w[1]))).sum();
    }
    Ok(traj)
}

/// Edges of T whose normal points into K from the K-edge with normal `n_k`.
fn admissible_t_edges(t: &ConvexPolygon, n_k: &Vec2) -> Vec<usize> {
    (0..t.len())
        .filter(|&i| t.outward_normal(i).dot(n_k) < -1e-6)
        .collect()
}

fn on_edge(p: &ConvexPolygon, i: usize, frac: f64) -> Vec2 {
    let (a, b) = p.edge(i);
    a + (b - a) * frac
}

/// Uniformly random regular start: q inside an edge of K, p inside an
/// admissible edge of T.
pub fn random_regular_start<R: Rng>(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    rng: &mut R,
) -> Result<BilliardState, DynamicsError> {
    loop {
        let ei = rng.gen_range(0..k.len());
        let q = on_edge(k, ei, rng.gen_range(0.01..0.99));
        let cands = admissible_t_edges(t, &k.outward_normal(ei));
        if cands.is_empty() {
            continue;
        }
        let ti = cands[rng.gen_range(0..cands.len())];
        let p = on_edge(t, ti, rng.gen_range(0.01..0.99));
        let s = BilliardState::new(k, t, q, p)?;
        if s.regular {
            return Ok(s);
        }
    }
}

/// `n` random regular starts drawn in order from a ChaCha8 stream.
pub fn seeded_starts(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    n: usize,
    seed: u64,
) -> Result<Vec<BilliardState>, DynamicsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_regular_start(k, t, &mut rng)).collect()
}

const START_OFFSET: f64 = 0.123_456_789;
const P_FRACTION: f64 = 0.414_213_562;

/// Starts at arc-length (i/n + offset) * perimeter, one per admissible T edge.
/// Doubling `n` keeps every earlier start.
pub fn equispaced_starts(k: &ConvexPolygon, t: &ConvexPolygon, n: usize) -> Vec<BilliardState> {
    let per = k.perimeter();
    let mut out = Vec::new();
    for i in 0..n {
        let s = ((i as f64 / n as f64 + START_OFFSET) % 1.0) * per;
        let q = k.boundary_point(s);
        let BoundarySite::Edge(ei) = boundary_site(k, &q).expect("boundary point") else {
            continue;
        };
        for ti in admissible_t_edges(t, &k.outward_normal(ei)) {
            if let Ok(st) = BilliardState::new(k, t, q, on_edge(t, ti, P_FRACTION)) {
                if st.regular {
                    out.push(st);
                }
            }
        }
    }
    out
}

/// Traces every start in parallel; results keep the input order.
pub fn trace_many(
    k: &ConvexPolygon,
    t: &ConvexPolygon,
    starts: &[BilliardState],
    max_steps: usize,
) -> Vec<Result<BilliardTrajectory, DynamicsError>> {
    starts.par_iter().map(|s| trace(k, t, s, max_steps)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReturnPattern {
    Upper,
    MiddleLeft,
    MiddleRight,
    LowerLeft,
    LowerRight,
}

impl ReturnPattern {
    pub const ALL: [ReturnPattern; 5] = [
        ReturnPattern::Upper,
        ReturnPattern::MiddleLeft,
        ReturnPattern::MiddleRight,
        ReturnPattern::LowerLeft,
        ReturnPattern::LowerRight,
    ];

    /// Lower patterns live on the a2 = 1 boundary case.
    pub fn is_lower(self) -> bool {
        matches!(self, ReturnPattern::LowerLeft | ReturnPattern::LowerRight)
    }
}

#[derive(Clone, Copy)]
enum Target {
    /// vertical line x = c
    X(f64),
    /// horizontal line y = c
    Y(f64),
}

/// Moves `pt` along slope `m` until it meets the target line.
fn project(pt: (f64, f64), m: f64, target: Target) -> (f64, f64) {
    let (x, y) = pt;
    match target {
        Target::X(c) => (c, y + m * (c - x)),
        Target::Y(c) => (x + (c - y) / m, c),
    }
}

fn open_unit(name: &str, v: f64) -> Result<(), DynamicsError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(DynamicsError::ParamOutOfRange(format!("{name} = {v} not in (0, 1)")))
    }
}

/// First coordinate after one full return of the square x diamond billiard,
/// written as projections along the trajectory segments.
pub fn algebraic_return_map(
    a1: f64,
    a2: f64,
    pattern: ReturnPattern,
    z1: f64,
) -> Result<f64, DynamicsError> {
    use Target::{X, Y};
    open_unit("a1", a1)?;
    open_unit("z1", z1)?;
    if pattern.is_lower() {
        if (a2 - 1.0).abs() > 1e-12 {
            return Err(DynamicsError::ParamOutOfRange(format!(
                "a2 = {a2}, lower patterns need a2 = 1"
            )));
        }
    } else {
        open_unit("a2", a2)?;
    }
    let s_a = -a1 / (1.0 - a2);
    let s_b = (a1 - 1.0) / (a2 - 1.0);
    let steps: Vec<(f64, Target)> = match pattern {
        ReturnPattern::Upper => vec![
            (s_a, X(0.0)),
            (s_b, Y(1.0)),
            ((a1 - 1.0) / a2, X(1.0)),
            (a1 / a2, Y(0.0)),
        ],
        ReturnPattern::MiddleRight => vec![
            (s_a, X(0.0)),
            (s_b, X(1.0)),
            (s_a, Y(1.0)),
            (a1 / a2, Y(0.0)),
        ],
        ReturnPattern::MiddleLeft => vec![
            (s_b, X(1.0)),
            (s_a, X(0.0)),
            (s_b, Y(1.0)),
            ((a1 - 1.0) / a2, Y(0.0)),
        ],
        ReturnPattern::LowerRight => vec![(a1 - 1.0, X(1.0)), (a1, X(0.0)), (a1 - 1.0, Y(0.0))],
        ReturnPattern::LowerLeft => vec![(a1, X(0.0)), (a1 - 1.0, X(1.0)), (a1, Y(0.0))],
    };
    // the lower patterns start on the top side and the last vertical leg is implicit
    let start = if pattern.is_lower() { (z1, 1.0) } else { (z1, 0.0) };
    let end = steps.into_iter().fold(start, |pt, (m, tg)| project(pt, m, tg));
    Ok(end.0)
}

/// Dual trajectory in the diamond: from (z1, g2(z1)) project horizontally to
/// g3, vertically to g4, horizontally to g1.
pub fn dual_return_map(a1: f64, a2: f64, z1: f64) -> Result<Vec2, DynamicsError> {
    open_unit("a1", a1)?;
    open_unit("a2", a2)?;
    if !(z1 > 0.0 && z1 < a1) {
        return Err(DynamicsError::ParamOutOfRange(format!("z1 = {z1} not in (0, a1)")));
    }
    let g2 = |x: f64| a2 - a2 * x / a1;
    let g3_inv = |y: f64| (y * (1.0 - a1) + a1 * a2) / a2;
    let g4 = |x: f64| (1.0 - a1 * a2) / (1.0 - a1) - (1.0 - a2) * x / (1.0 - a1);
    let g1_inv = |y: f64| (y - a2) * a1 / (1.0 - a2);
    let y0 = g2(z1);
    let x1 = g3_inv(y0);
    let y1 = g4(x1);
    let x2 = g1_inv(y1);
    Ok(Vec2::new(x2, y1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub name: &'static str,
    pub k: ConvexPolygon,
    pub t: ConvexPolygon,
    pub q: Vec<Vec2>,
    pub p: Vec<Vec2>,
    pub printed_length: f64,
    pub printed_capacity: f64,
    pub length: f64,
    pub capacity: f64,
    pub verified: bool,
}

fn poly(c: &[[f64; 2]]) -> ConvexPolygon {
    ConvexPolygon::from_coords(c).expect("fixed polygon")
}

/// The two non-regular closed trajectories that are not length minimizing,
/// with their lengths and the capacities recomputed.
pub fn counterexample_catalog() -> Result<Vec<Counterexample>, DynamicsError> {
    let raw = vec![
        (
            "triangle x hexagon",
            poly(&[[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]]),
            poly(&[
                [-0.5, -1.0],
                [0.5, -1.0],
                [1.5, 0.0],
                [0.5, 1.0],
                [-0.5, 1.0],
                [-1.5, 0.0],
            ]),
            vec![Vec2::new(1.0, -1.0), Vec2::new(-1.0, -1.0)],
            vec![Vec2::new(-1.5, 0.0), Vec2::new(1.5, 0.0)],
            6.0,
            4.0,
        ),
        (
            "square x diamond(1/2, 1/4)",
            poly(&[[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]),
            diamond(0.5, 0.25).expect("diamond"),
            vec![Vec2::new(1.0, -1.0), Vec2::new(-1.0, 1.0)],
            vec![Vec2::new(0.5, 1.0), Vec2::new(1.0, 0.25)],
            2.5,
            2.0,
        ),
    ];
    raw.into_iter()
        .map(|(name, k, t, q, p, pl, pc)| {
            let curve = ClosedPolygonalCurve::new(q.clone())?;
            let length = crate::capacity::ell_length(&curve, &t);
            let capacity = ehz_capacity(&k, &t)?.value;
            let verified = (length - pl).abs() <= 1e-12 && (capacity - pc).abs() <= 1e-3 * pc;
            Ok(Counterexample {
                name,
                k,
                t,
                q,
                p,
                printed_length: pl,
                printed_capacity: pc,
                length,
                capacity,
                verified,
            })
        })
        .collect()
}

fn dist_to_segment(x: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    crate::geom2d::segment_distance(x, a, b)
}

/// Fraction of raster cells inside K lying within one cell diagonal of a
/// traced q-path, over `n_starts` equispaced starts.
pub fn coverage_sample(k: &ConvexPolygon, t: &ConvexPolygon, n_starts: usize, grid: usize) -> f64 {
    let starts = equispaced_starts(k, t, n_starts);
    let segs: Vec<(Vec2, Vec2)> = trace_many(k, t, &starts, 64)
        .into_iter()
        .filter_map(Result::ok)
        .flat_map(|tr| {
            let qs: Vec<Vec2> = tr.states.iter().map(|s| s.q).collect();
            qs.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>()
        })
        .collect();
    let (lo, hi) = k.bbox();
    let (w, h) = ((hi.x - lo.x) / grid as f64, (hi.y - lo.y) / grid as f64);
    let diag = (w * w + h * h).sqrt();
    let mut marked = vec![false; grid * grid];
    let cell_of = |x: f64, lo: f64, step: f64| ((x - lo) / step).floor() as i64;
    for (a, b) in &segs {
        let (slo, shi) = (a.inf(b), a.sup(b));
        let (i0, i1) = (
            cell_of(slo.x - diag, lo.x, w).max(0),
            cell_of(shi.x + diag, lo.x, w).min(grid as i64 - 1),
        );
        let (j0, j1) = (
            cell_of(slo.y - diag, lo.y, h).max(0),
            cell_of(shi.y + diag, lo.y, h).min(grid as i64 - 1),
        );
        for i in i0..=i1 {
            for j in j0..=j1 {
                let c = Vec2::new(lo.x + (i as f64 + 0.5) * w, lo.y + (j as f64 + 0.5) * h);
                if dist_to_segment(&c, a, b) <= diag {
                    marked[i as usize * grid + j as usize] = true;
                }
            }
        }
    }
    let (mut inside, mut hit) = (0usize, 0usize);
    for i in 0..grid {
        for j in 0..grid {
            let c = Vec2::new(lo.x + (i as f64 + 0.5) * w, lo.y + (j as f64 + 0.5) * h);
            if k.contains(&c, 0.0) {
                inside += 1;
                if marked[i * grid + j] {
                    hit += 1;
                }
            }
        }
    }
    if inside == 0 {
        0.0
    } else {
        hit as f64 / inside as f64
    }
}
