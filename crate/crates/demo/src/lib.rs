//! Browser bindings. Each export returns a JSON string; errors come back as
//! a thrown string. The `*_json` functions are the same operations for
//! native callers and tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use zf_core::exact::{Budget, RhoOptions};
use zf_core::models::{self, TestGraph};
use zf_core::poly::InterpolationKind;
use zf_core::pseudo::{self, Theorem1Options, PRECISION_BITS};
use zf_core::rational::{format_q, parse_q, to_f64};
use zf_core::{ColorAssignment, DecoratedGraph, NodeSet};

/// Browser runs stay interactive: at most this many configurations.
const DEMO_BUDGET: u128 = 1 << 20;
const MAX_NODES: usize = 16;

type Out = Result<String, String>;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// `grid` is `size x size`; `tree` is the 3-regular tree of depth `size`.
fn build(graph: &str, size: usize, model: &str, param: &str) -> Result<DecoratedGraph, String> {
    let spec = match graph {
        "path" => TestGraph::Path(size),
        "cycle" => TestGraph::Cycle(size),
        "complete" => TestGraph::Complete(size),
        "grid" => TestGraph::Grid { w: size, h: size },
        "tree" => TestGraph::RegularTree { d: 3, depth: size },
        other => return Err(format!("unknown graph {other:?}")),
    };
    let g = models::build_test_graph(spec).map_err(err)?;
    if g.n() > MAX_NODES {
        return Err(format!("{} nodes; the demo stops at {MAX_NODES}", g.n()));
    }
    match model {
        "hardcore" => models::build_hardcore(&g, &parse_q(param).map_err(err)?).map_err(err),
        "coloring" => {
            let k = param
                .trim()
                .parse()
                .map_err(|_| format!("K = {param:?} is not an integer"))?;
            models::build_proper_coloring(&g, k).map_err(err)
        }
        other => Err(format!("unknown model {other:?}")),
    }
}

fn kind(s: &str) -> Result<InterpolationKind, String> {
    s.parse().map_err(err)
}

fn start(g: &DecoratedGraph, s: usize) -> Result<NodeSet, String> {
    NodeSet::new([s], g.n()).map_err(err)
}

pub fn accuracy_json(graph: &str, size: usize, model: &str, param: &str, kind_s: &str, m_max: usize) -> Out {
    let g = build(graph, size, model, param)?;
    let rows = pseudo::interpolation_accuracy(&g, kind(kind_s)?, m_max, Budget(DEMO_BUDGET)).map_err(err)?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "m": r.m, "estimate": r.estimate, "relative_error": r.relative_error }))
        .collect();
    Ok(json!({ "n": g.n(), "precision_bits": PRECISION_BITS, "rows": rows }).to_string())
}

pub fn ssm_json(graph: &str, size: usize, model: &str, param: &str, s: usize, kind_s: &str, m: usize) -> Out {
    let g = build(graph, size, model, param)?;
    let s = start(&g, s)?;
    let eccentricity = g.graph().distances(&s).into_iter().flatten().max().unwrap_or(0);
    let radii: Vec<usize> = (1..=eccentricity.max(1)).collect();
    let opts = RhoOptions {
        budget: Budget(DEMO_BUDGET),
        ..RhoOptions::default()
    };
    let label = parse_q("0").map_err(err)?;
    let rows = pseudo::ssm_scan(&[(label, g)], &s, &radii, Some((kind(kind_s)?, m)), &opts).map_err(err)?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "R": r.r,
                "boundary_size": r.boundary_size,
                "rho": format_q(&r.rho),
                "rho_f64": to_f64(&r.rho),
                "pseudo_gap": r.pseudo_gap,
                "pseudo_exact_zero": r.pseudo_exact_zero,
                "radius_condition": r.radius_condition,
            })
        })
        .collect();
    Ok(json!({ "rows": rows }).to_string())
}

fn colors(a: &ColorAssignment) -> Value {
    Value::Array(a.iter().map(|(u, c)| json!([u, c + 1])).collect())
}

#[allow(clippy::too_many_arguments)]
pub fn theorem1_json(
    graph: &str,
    size: usize,
    model: &str,
    param: &str,
    s: usize,
    r: usize,
    kind_s: &str,
    m: usize,
) -> Out {
    let g = build(graph, size, model, param)?;
    let s = start(&g, s)?;
    let rep = pseudo::theorem1_check(&g, &s, None, r, kind(kind_s)?, m, &Theorem1Options::default()).map_err(err)?;
    let witness = rep.witness.as_ref().map(|w| {
        json!({
            "sigma": colors(&w.sigma),
            "tau": colors(&w.tau),
            "k": w.k,
            "lhs": format_q(&w.lhs),
            "rhs": format_q(&w.rhs),
        })
    });
    Ok(json!({
        "holds": rep.holds,
        "vacuous": rep.vacuous,
        "sampled": rep.sampled,
        "boundary": rep.boundary.as_slice(),
        "tau_count": rep.tau_count.to_string(),
        "required_radius": rep.required_radius,
        "radius_condition": rep.radius_condition,
        "witness": witness,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn accuracy(
    graph: &str,
    size: usize,
    model: &str,
    param: &str,
    kind: &str,
    m_max: usize,
) -> Result<String, JsValue> {
    accuracy_json(graph, size, model, param, kind, m_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ssm(
    graph: &str,
    size: usize,
    model: &str,
    param: &str,
    s: usize,
    kind: &str,
    m: usize,
) -> Result<String, JsValue> {
    ssm_json(graph, size, model, param, s, kind, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn theorem1(
    graph: &str,
    size: usize,
    model: &str,
    param: &str,
    s: usize,
    r: usize,
    kind: &str,
    m: usize,
) -> Result<String, JsValue> {
    theorem1_json(graph, size, model, param, s, r, kind, m).map_err(|e| JsValue::from_str(&e))
}
