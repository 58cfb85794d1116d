use crate::output::emit;
use crate::{CaseArgs, CliError, Command, CoveringKind, Family, OutArgs, Pair};
use ehz::capacity::{ehz_capacity, ehz_capacity_with, systolic_from_value};
use ehz::covering::{
    conjecture_sweep, minimize_hull_area, trapezoid_case_certify, CoveringInstance, FLAG_TOL,
};
use ehz::dynamics::{
    counterexample_catalog, equispaced_starts, seeded_starts, trace, trace_many, BilliardState,
};
use ehz::equality_cases::{
    quad_partner_product, square_diamond_product, standard_triangle, triangle_tstar_product,
    CatalogProduct, QuadParams,
};
use ehz::geom2d::{ConvexPolygon, Mat2, Vec2};
use ehz::io::{
    capacity_value, covering_value, polygon_from_json, polygon_value, render_svg, sweep_csv,
    systolic_value, to_json_string,
};
use ehz::symplecto::{quadrilateral_normal_form, triangle_normal_form};
use serde_json::{json, Value};
use std::fmt::Display;
use std::path::Path;

fn invalid(e: impl Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn read_text(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{what}: cannot read {}: {e}", path.display())))
}

fn read_polygon(path: &Path, what: &str) -> Result<ConvexPolygon, CliError> {
    polygon_from_json(&read_text(path, what)?).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

fn read_pair(pair: &Pair) -> Result<(ConvexPolygon, ConvexPolygon), CliError> {
    Ok((read_polygon(&pair.k, "K")?, read_polygon(&pair.t, "T")?))
}

fn read_params(path: &Path) -> Result<QuadParams, CliError> {
    serde_json::from_str(&read_text(path, "params")?)
        .map_err(|e| CliError::Invalid(format!("params: {e}")))
}

fn parse_xy(s: &str, what: &str) -> Result<Vec2, CliError> {
    let bad = || CliError::Invalid(format!("{what}: expected \"x,y\", got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(bad());
    }
    Ok(Vec2::new(x, y))
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Invalid(format!("{what}: required")))
}

fn json_text(v: &Value) -> Result<String, CliError> {
    let mut s = to_json_string(v).map_err(|e| CliError::Write(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn mat_value(m: &Mat2) -> Value {
    json!([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

fn build_case(c: &CaseArgs) -> Result<CatalogProduct, CliError> {
    match c.family {
        Family::SquareDiamond => {
            square_diamond_product(need(c.a1, "a1")?, need(c.a2, "a2")?).map_err(invalid)
        }
        Family::TriangleTstar => {
            let t = parse_xy(c.t.as_deref().ok_or_else(|| invalid("t: required"))?, "t")?;
            let tri = match &c.triangle {
                Some(p) => read_polygon(p, "triangle")?,
                None => standard_triangle(),
            };
            triangle_tstar_product(&tri, &t).map_err(invalid)
        }
        Family::Quadrilateral => {
            let path = c.params.as_deref().ok_or_else(|| invalid("params: required"))?;
            quad_partner_product(&read_params(path)?).map_err(invalid)
        }
    }
}

/// Small-denominator fraction when x is within 1e-6 of one, else a decimal.
fn pretty(x: f64) -> String {
    for q in 1..=12i64 {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= 1e-6 {
            return if q == 1 { format!("{p}") } else { format!("{p}/{q}") };
        }
    }
    format!("{x:.9}")
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Capacity { pair, resolution, out } => {
            let (k, t) = read_pair(&pair)?;
            let r = ehz_capacity_with(&k, &t, resolution).map_err(invalid)?;
            emit(&out, "capacity.json", &json_text(&capacity_value(&r))?)
        }
        Command::Ratio {
            pair,
            resolution,
            equality_tol,
            out,
        } => {
            let (k, t) = read_pair(&pair)?;
            let c = ehz_capacity_with(&k, &t, resolution).map_err(invalid)?;
            let mut r = systolic_from_value(c.value, &k, &t);
            r.is_equality = (r.ratio - 1.0).abs() <= equality_tol;
            emit(&out, "ratio.json", &json_text(&systolic_value(&r))?)
        }
        Command::Equality {
            case,
            resolution,
            tol,
            out,
        } => equality(&case, resolution, tol, &out),
        Command::Zoll {
            case,
            starts,
            seed,
            equispaced,
            max_steps,
            length_tol,
            json,
            out,
        } => zoll(&case, starts, seed, equispaced, max_steps, length_tol, json, &out),
        Command::Covering {
            instance,
            z,
            a1,
            a2,
            grid,
            starts,
            seed,
            out,
        } => covering(instance, z, a1, a2, grid, starts, seed, &out),
        Command::Counterexample { json, out } => counterexample(json, &out),
        Command::NormalForm { t, params, tol, out } => normal_form(t, params, tol, &out),
        Command::Plot {
            pair,
            q,
            p,
            steps,
            out,
        } => plot(&pair, q, p, steps, &out),
    }
}

fn equality(case: &CaseArgs, resolution: usize, tol: f64, out: &OutArgs) -> Result<(), CliError> {
    let prod = build_case(case)?;
    let c = ehz_capacity_with(&prod.k, &prod.t, resolution).map_err(invalid)?;
    let r = systolic_from_value(c.value, &prod.k, &prod.t);
    let verified = (r.ratio - 1.0).abs() <= tol;
    let report = json!({
        "family": prod.name,
        "K": polygon_value(&prod.k),
        "T": polygon_value(&prod.t),
        "capacity": c.value,
        "dual_value": c.dual_value,
        "solver": c.solver,
        "volume_product": r.volume_product,
        "ratio": r.ratio,
        "tol": tol,
        "verified": verified,
    });
    emit(out, "equality.json", &json_text(&report)?)?;
    if verified {
        Ok(())
    } else {
        Err(CliError::Identity(format!("{}: ratio {} differs from 1 by more than {tol}", prod.name, r.ratio)))
    }
}

#[allow(clippy::too_many_arguments)]
fn zoll(
    case: &CaseArgs,
    n: usize,
    seed: Option<u64>,
    equispaced: bool,
    max_steps: usize,
    length_tol: f64,
    as_json: bool,
    out: &OutArgs,
) -> Result<(), CliError> {
    let prod = build_case(case)?;
    let (k, t) = (&prod.k, &prod.t);
    if n == 0 {
        return Err(invalid("starts: must be positive"));
    }
    let starts = if equispaced {
        equispaced_starts(k, t, n)
    } else {
        let seed = seed.ok_or_else(|| invalid("seed: required for random starts (or pass --equispaced)"))?;
        seeded_starts(k, t, n, seed).map_err(invalid)?
    };
    let cap = ehz_capacity(k, t).map_err(invalid)?.value;
    let runs = trace_many(k, t, &starts, max_steps);
    let mut closed = 0;
    let mut bounces: Vec<usize> = Vec::new();
    let mut worst_len: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for tr in runs.iter().flatten().filter(|tr| tr.closed) {
        closed += 1;
        if !bounces.contains(&tr.bounce_count) {
            bounces.push(tr.bounce_count);
        }
        worst_len = worst_len.max((tr.length_t - cap).abs());
        worst_res = worst_res.max(tr.closure_residual);
    }
    bounces.sort_unstable();
    let bounce_text = match bounces.as_slice() {
        [] => "none".to_string(),
        [b] => b.to_string(),
        many => many.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("|"),
    };
    let length_ok = closed > 0 && worst_len <= length_tol;
    let length_text = if length_ok {
        "capacity".to_string()
    } else {
        format!("capacity{worst_len:+.3e}")
    };
    let total = starts.len();
    let summary = format!("closed={closed}/{total}, bounces={bounce_text}, length={length_text}");
    let passed = closed == total && bounces == [4] && length_ok;
    let body = if as_json {
        json_text(&json!({
            "case": prod.name,
            "starts": total,
            "closed": closed,
            "bounce_counts": bounces,
            "capacity": cap,
            "max_length_error": worst_len,
            "max_closure_residual": worst_res,
            "summary": summary,
        }))?
    } else {
        format!("{summary}\n")
    };
    emit(out, if as_json { "zoll.json" } else { "zoll.txt" }, &body)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Identity(summary))
    }
}

#[allow(clippy::too_many_arguments)]
fn covering(
    kind: CoveringKind,
    z: Option<f64>,
    a1: Option<f64>,
    a2: Option<f64>,
    grid: usize,
    starts: usize,
    seed: Option<u64>,
    out: &OutArgs,
) -> Result<(), CliError> {
    let seed_for = |s: Option<u64>| s.ok_or_else(|| invalid("seed: required for the covering search"));
    if starts == 0 {
        return Err(invalid("starts: must be positive"));
    }
    match kind {
        CoveringKind::Trapezoid => {
            let inst = CoveringInstance::trapezoid_instance(need(z, "z")?).map_err(invalid)?;
            let r = minimize_hull_area(&inst, starts, seed_for(seed)?);
            emit(out, "covering.json", &json_text(&covering_value(&r))?)?;
            if r.below_reference {
                return Err(CliError::Identity(format!("hull area {} below the square", r.best_area)));
            }
            Ok(())
        }
        CoveringKind::Certify => {
            let rep = trapezoid_case_certify(need(z, "z")?).map_err(invalid)?;
            let v = serde_json::to_value(&rep).map_err(|e| CliError::Write(e.to_string()))?;
            emit(out, "certify.json", &json_text(&v)?)?;
            if rep.passed {
                Ok(())
            } else {
                Err(CliError::Identity("a case bound was violated".into()))
            }
        }
        CoveringKind::Conjecture => {
            let (inst, l1, l2) = CoveringInstance::conjecture_instance(need(a1, "a1")?, need(a2, "a2")?)
                .map_err(invalid)?;
            let r = minimize_hull_area(&inst, starts, seed_for(seed)?);
            let mut v = covering_value(&r);
            v["lambda1"] = json!(l1);
            v["lambda2"] = json!(l2);
            v["flagged"] = json!(r.best_area - 1.0 < -FLAG_TOL);
            emit(out, "covering.json", &json_text(&v)?)
        }
        CoveringKind::Sweep => {
            let rows = conjecture_sweep(grid, starts, seed_for(seed)?).map_err(invalid)?;
            emit(out, "sweep.csv", &sweep_csv(&rows))
        }
    }
}

fn counterexample(as_json: bool, out: &OutArgs) -> Result<(), CliError> {
    let cat = counterexample_catalog().map_err(invalid)?;
    let body = if as_json {
        let items: Vec<Value> = cat
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "K": polygon_value(&c.k),
                    "T": polygon_value(&c.t),
                    "q": c.q.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
                    "p": c.p.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
                    "length": c.length,
                    "capacity": c.capacity,
                    "verified": c.verified,
                })
            })
            .collect();
        json_text(&Value::Array(items))?
    } else {
        cat.iter()
            .map(|c| format!("{}: length {} vs capacity {}\n", c.name, pretty(c.length), pretty(c.capacity)))
            .collect()
    };
    emit(out, if as_json { "counterexample.json" } else { "counterexample.txt" }, &body)?;
    match cat.iter().find(|c| !c.verified) {
        Some(c) => Err(CliError::Identity(format!("{}: values not reproduced", c.name))),
        None => Ok(()),
    }
}

fn normal_form(
    t: Option<String>,
    params: Option<std::path::PathBuf>,
    tol: f64,
    out: &OutArgs,
) -> Result<(), CliError> {
    let (report, worst) = match (t, params) {
        (Some(t), None) => {
            let t = parse_xy(&t, "t")?;
            let nf = triangle_normal_form(&t).map_err(invalid)?;
            let (rk, rt) = nf.residuals().map_err(invalid)?;
            let v = json!({
                "kind": "triangle",
                "edge": nf.edge,
                "t": [t.x, t.y],
                "matrix": mat_value(&nf.matrix),
                "x_map": nf.x_map,
                "y_map": nf.y_map,
                "ball": nf.ball,
                "residual_K": rk,
                "residual_T": rt,
            });
            (v, rk.max(rt))
        }
        (None, Some(path)) => {
            let p = read_params(&path)?;
            let nf = quadrilateral_normal_form(&p).map_err(invalid)?;
            let (rq, rp) = nf.residuals(&p).map_err(invalid)?;
            let v = json!({
                "kind": "quadrilateral",
                "params": p,
                "x_chain": nf.x_chain,
                "y_chain": nf.y_chain,
                "ball": nf.ball,
                "residual_K": rq,
                "residual_T": rp,
            });
            (v, rq.max(rp))
        }
        _ => return Err(invalid("pass exactly one of --t or --params")),
    };
    emit(out, "normal_form.json", &json_text(&report)?)?;
    if worst <= tol {
        Ok(())
    } else {
        Err(CliError::Identity(format!("vertex residual {worst:e} above {tol:e}")))
    }
}

fn plot(pair: &Pair, q: Option<String>, p: Option<String>, steps: usize, out: &OutArgs) -> Result<(), CliError> {
    let (k, t) = read_pair(pair)?;
    let (qs, ps) = match (q, p) {
        (Some(q), Some(p)) => {
            let start = BilliardState::new(&k, &t, parse_xy(&q, "q")?, parse_xy(&p, "p")?).map_err(invalid)?;
            let tr = trace(&k, &t, &start, steps).map_err(invalid)?;
            (tr.states.iter().map(|s| s.q).collect(), tr.states.iter().map(|s| s.p).collect())
        }
        _ => {
            let c = ehz_capacity(&k, &t).map_err(invalid)?;
            let mut qs = c.optimizer_curve.vertices().to_vec();
            qs.push(qs[0]);
            (qs, Vec::new())
        }
    };
    emit(out, "plot.svg", &render_svg(&k, &t, &qs, &ps))
}
