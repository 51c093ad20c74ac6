//! Turning flags into graphs, assignments and sweeps.

use std::collections::{BTreeMap, BTreeSet};

use zf_core::io::{parse_graph_json, LabeledGraph};
use zf_core::models::{self, ModelSpec, TestGraph};
use zf_core::rational::{parse_q, Q};
use zf_core::subgraph::PatternGraph;
use zf_core::{ColorAssignment, Graph, NodeSet};

use crate::CliError;

/// `k=v,k=v` pairs; later keys win.
pub fn parse_params(s: Option<&str>) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    let Some(s) = s else { return Ok(out) };
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("parameter {part:?} is not key=value")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get_usize(p: &BTreeMap<String, String>, key: &str) -> Result<usize, CliError> {
    let v = p
        .get(key)
        .ok_or_else(|| CliError::config(format!("missing parameter {key}")))?;
    v.parse()
        .map_err(|_| CliError::config(format!("parameter {key}={v} is not a nonnegative integer")))
}

fn get_q(p: &BTreeMap<String, String>, key: &str) -> Result<Q, CliError> {
    let v = p
        .get(key)
        .ok_or_else(|| CliError::config(format!("missing parameter {key}")))?;
    Ok(parse_q(v)?)
}

pub fn test_graph(name: &str, p: &BTreeMap<String, String>) -> Result<Graph, CliError> {
    let spec = match name {
        "path" => TestGraph::Path(get_usize(p, "n")?),
        "cycle" => TestGraph::Cycle(get_usize(p, "n")?),
        "complete" => TestGraph::Complete(get_usize(p, "n")?),
        "grid" => TestGraph::Grid {
            w: get_usize(p, "w")?,
            h: get_usize(p, "h")?,
        },
        "tree" | "regular_tree" => TestGraph::RegularTree {
            d: get_usize(p, "d")?,
            depth: get_usize(p, "depth")?,
        },
        "edgeless" => return Ok(Graph::new(get_usize(p, "n")?)),
        other => return Err(CliError::config(format!("unknown builder {other:?}"))),
    };
    Ok(models::build_test_graph(spec)?)
}

/// 1-based color lists: `1+2;1;2+3`, one group per node.
fn parse_lists(s: &str, k: usize, n: usize) -> Result<Vec<BTreeSet<usize>>, CliError> {
    let lists: Vec<BTreeSet<usize>> = s
        .split(';')
        .map(|group| {
            group
                .split('+')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| parse_color(c, k))
                .collect::<Result<BTreeSet<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    if lists.len() != n {
        return Err(CliError::config(format!("{} color lists for {n} nodes", lists.len())));
    }
    Ok(lists)
}

pub fn model_spec(name: &str, p: &BTreeMap<String, String>, n: usize) -> Result<ModelSpec, CliError> {
    Ok(match name {
        "hardcore" => ModelSpec::Hardcore {
            lambda: get_q(p, "lambda")?,
        },
        "coloring" | "proper_coloring" => ModelSpec::ProperColoring { k: get_usize(p, "K")? },
        "list" | "list_coloring" => {
            let k = get_usize(p, "K")?;
            let raw = p
                .get("lists")
                .ok_or_else(|| CliError::config("missing parameter lists"))?;
            ModelSpec::ListColoring {
                k,
                lists: parse_lists(raw, k, n)?,
            }
        }
        "ising" => ModelSpec::Ising {
            h_factor: get_q(p, "h_factor")?,
            b: get_q(p, "b")?,
        },
        other => return Err(CliError::config(format!("unknown model {other:?}"))),
    })
}

/// Where the decorated graph comes from.
#[derive(Clone, Debug)]
pub struct GraphSource {
    pub file: Option<String>,
    pub builder: Option<String>,
    pub model: Option<String>,
    pub params: BTreeMap<String, String>,
}

impl GraphSource {
    pub fn load(&self) -> Result<LabeledGraph, CliError> {
        match (&self.file, &self.builder) {
            (Some(path), None) => {
                if self.model.is_some() {
                    return Err(CliError::config(
                        "--model applies to --builder; a graph file carries its decoration",
                    ));
                }
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?;
                Ok(parse_graph_json(&text)?)
            }
            (None, Some(builder)) => {
                let graph = test_graph(builder, &self.params)?;
                let model = self
                    .model
                    .as_deref()
                    .ok_or_else(|| CliError::config("--builder needs --model"))?;
                let decorated = model_spec(model, &self.params, graph.n())?.build(&graph)?;
                Ok(LabeledGraph::with_index_ids(decorated))
            }
            (Some(_), Some(_)) => Err(CliError::config("give either --graph or --builder, not both")),
            (None, None) => Err(CliError::config("one of --graph or --builder is required")),
        }
    }
}

pub fn parse_color(s: &str, k: usize) -> Result<usize, CliError> {
    let c: usize = s
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("color {s:?} is not an integer")))?;
    if c == 0 || c > k {
        return Err(CliError::config(format!("color {c} outside 1..={k}")));
    }
    Ok(c - 1)
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

pub fn node_set(lg: &LabeledGraph, ids: Option<&str>) -> Result<NodeSet, CliError> {
    let Some(ids) = ids else { return Ok(NodeSet::default()) };
    let idx = split_list(ids)
        .into_iter()
        .map(|id| {
            lg.index_of(id)
                .ok_or_else(|| CliError::config(format!("unknown node id {id:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NodeSet::new(idx, lg.graph.n())?)
}

/// Colors (1-based) zipped with ids, in the order given.
pub fn assignment(lg: &LabeledGraph, ids: Option<&str>, colors: Option<&str>) -> Result<ColorAssignment, CliError> {
    let (ids, colors) = match (ids, colors) {
        (None, None) => return Ok(ColorAssignment::new()),
        (Some(i), Some(c)) => (split_list(i), split_list(c)),
        (Some(_), None) | (None, Some(_)) => {
            return Err(CliError::config("node ids and colors must be given together"));
        }
    };
    if ids.len() != colors.len() {
        return Err(CliError::config(format!(
            "{} nodes but {} colors",
            ids.len(),
            colors.len()
        )));
    }
    let mut out = ColorAssignment::new();
    for (id, c) in ids.into_iter().zip(colors) {
        let u = lg
            .index_of(id)
            .ok_or_else(|| CliError::config(format!("unknown node id {id:?}")))?;
        out.insert(u, parse_color(c, lg.graph.k())?)?;
    }
    Ok(out)
}

/// `lo:hi:step` inclusive, exact rationals.
pub fn sweep_values(spec: &str) -> Result<(String, Vec<Q>), CliError> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("sweep {spec:?} is not param=lo:hi:step")))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(CliError::config(format!("sweep range {range:?} is not lo:hi:step")));
    };
    let (lo, hi, step) = (parse_q(lo)?, parse_q(hi)?, parse_q(step)?);
    if step <= Q::from_integer(0.into()) {
        return Err(CliError::config("sweep step must be positive"));
    }
    let mut values = Vec::new();
    let mut x = lo;
    while x <= hi {
        values.push(x.clone());
        x += &step;
        if values.len() > 10_000 {
            return Err(CliError::config("sweep has more than 10000 points"));
        }
    }
    Ok((name.trim().to_string(), values))
}

/// Comma list of radii, or `lo:hi` inclusive.
pub fn radii(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::config(format!("radius list {spec:?} is not r1,r2,... or lo:hi"));
    if let Some((lo, hi)) = spec.split_once(':') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        return Ok((lo..=hi).collect());
    }
    split_list(spec)
        .into_iter()
        .map(|r| r.parse().map_err(|_| bad()))
        .collect()
}

/// `name:k=v,...` using the builder names, e.g. `path:n=3`.
pub fn pattern(spec: &str) -> Result<PatternGraph, CliError> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let g = test_graph(name.trim(), &parse_params(Some(params))?)?;
    Ok(PatternGraph::from_graph(&g)?)
}
