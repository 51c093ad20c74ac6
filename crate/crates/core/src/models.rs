//! Decorations for the hard-core, proper coloring, list coloring and Ising
//! models, and the standard test graphs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{ColorAssignment, DecoratedGraph, Graph, Matrix};
use crate::rational::{int, Q};

/// Hard-core color of an empty node.
pub const UNOCCUPIED: usize = 0;
/// Hard-core color of a node in the independent set.
pub const OCCUPIED: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Hardcore {
        lambda: Q,
    },
    ProperColoring {
        k: usize,
    },
    /// `lists[u]` holds 0-based colors out of `0..k`.
    ListColoring {
        k: usize,
        lists: Vec<BTreeSet<usize>>,
    },
    /// `h_factor` stands for `e^h` and `b` for `e^beta`.
    Ising {
        h_factor: Q,
        b: Q,
    },
}

impl ModelSpec {
    pub fn build(&self, graph: &Graph) -> Result<DecoratedGraph> {
        match self {
            ModelSpec::Hardcore { lambda } => build_hardcore(graph, lambda),
            ModelSpec::ProperColoring { k } => build_proper_coloring(graph, *k),
            ModelSpec::ListColoring { k, lists } => build_list_coloring(graph, *k, lists),
            ModelSpec::Ising { h_factor, b } => build_ising(graph, h_factor, b),
        }
    }
}

fn hardcore_matrix() -> Matrix {
    Matrix::from_fn(2, |i, j| {
        if i == OCCUPIED && j == OCCUPIED {
            Q::zero()
        } else {
            Q::one()
        }
    })
}

/// `a^u = (1, lambda)`, `A = [[1, 1], [1, 0]]`.
pub fn build_hardcore(graph: &Graph, lambda: &Q) -> Result<DecoratedGraph> {
    if lambda.is_negative() {
        return Err(Error::InvalidModel(format!("negative fugacity {lambda}")));
    }
    let a = vec![Q::one(), lambda.clone()];
    DecoratedGraph::from_fn(graph.clone(), 2, |_| a.clone(), |_, _| hardcore_matrix())
}

pub fn build_proper_coloring(graph: &Graph, k: usize) -> Result<DecoratedGraph> {
    if k == 0 {
        return Err(Error::InvalidModel("K must be at least 1".into()));
    }
    let m = Matrix::from_fn(k, |i, j| if i == j { Q::zero() } else { Q::one() });
    DecoratedGraph::from_fn(graph.clone(), k, |_| vec![Q::one(); k], |_, _| m.clone())
}

/// Lists act only through the edge matrices, so an isolated node still
/// contributes a factor `K` rather than `|C(u)|`.
pub fn build_list_coloring(graph: &Graph, k: usize, lists: &[BTreeSet<usize>]) -> Result<DecoratedGraph> {
    if k == 0 {
        return Err(Error::InvalidModel("K must be at least 1".into()));
    }
    if lists.len() != graph.n() {
        return Err(Error::InvalidModel(format!(
            "{} color lists for {} nodes",
            lists.len(),
            graph.n()
        )));
    }
    if let Some(&c) = lists.iter().flatten().find(|&&c| c >= k) {
        return Err(Error::ColorOutOfRange { color: c, k });
    }
    DecoratedGraph::from_fn(
        graph.clone(),
        k,
        |_| vec![Q::one(); k],
        |u, v| {
            Matrix::from_fn(k, |i, j| {
                if i != j && lists[u].contains(&i) && lists[v].contains(&j) {
                    Q::one()
                } else {
                    Q::zero()
                }
            })
        },
    )
}

/// `a = (1, h_factor)`, `A_11 = A_22 = b`, `A_12 = A_21 = 1/b`.
pub fn build_ising(graph: &Graph, h_factor: &Q, b: &Q) -> Result<DecoratedGraph> {
    if !b.is_positive() {
        return Err(Error::InvalidModel(format!("Ising factor b must be positive, got {b}")));
    }
    if h_factor.is_negative() {
        return Err(Error::InvalidModel(format!("negative field factor {h_factor}")));
    }
    let inv = b.recip();
    let m = Matrix::from_fn(2, |i, j| if i == j { b.clone() } else { inv.clone() });
    DecoratedGraph::from_fn(graph.clone(), 2, |_| vec![Q::one(), h_factor.clone()], |_, _| m.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestGraph {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Grid {
        w: usize,
        h: usize,
    },
    /// Root has `d` children, every other internal node `d - 1`, so internal
    /// nodes have degree `d`.
    RegularTree {
        d: usize,
        depth: usize,
    },
}

pub fn build_test_graph(spec: TestGraph) -> Result<Graph> {
    let too_small = |what: &str| Err(Error::InvalidGraph(format!("{what} is too small")));
    match spec {
        TestGraph::Path(n) => {
            if n < 1 {
                return too_small("path");
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        TestGraph::Cycle(n) => {
            if n < 3 {
                return too_small("cycle");
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)
        }
        TestGraph::Complete(n) => {
            if n < 1 {
                return too_small("complete graph");
            }
            let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            Graph::from_edges(n, &edges)
        }
        TestGraph::Grid { w, h } => {
            if w < 1 || h < 1 {
                return too_small("grid");
            }
            let id = |x: usize, y: usize| y * w + x;
            let mut edges = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if x + 1 < w {
                        edges.push((id(x, y), id(x + 1, y)));
                    }
                    if y + 1 < h {
                        edges.push((id(x, y), id(x, y + 1)));
                    }
                }
            }
            Graph::from_edges(w * h, &edges)
        }
        TestGraph::RegularTree { d, depth } => {
            if d < 1 {
                return too_small("tree");
            }
            let mut edges = Vec::new();
            let mut level = vec![0usize];
            let mut n = 1;
            for depth_i in 0..depth {
                let fanout = if depth_i == 0 { d } else { d - 1 };
                let mut next = Vec::new();
                for &p in &level {
                    for _ in 0..fanout {
                        edges.push((p, n));
                        next.push(n);
                        n += 1;
                    }
                }
                level = next;
            }
            Graph::from_edges(n, &edges)
        }
    }
}

/// `G(n, p)` with a caller-supplied generator.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

/// Uniqueness threshold `(d-1)^(d-1) / (d-2)^d`, `d >= 3`.
pub fn lambda_c(d: usize) -> Result<Q> {
    if d < 3 {
        return Err(Error::InvalidModel(format!("lambda_c needs d >= 3, got {d}")));
    }
    let num = num_traits::pow(BigInt::from(d - 1), d - 1);
    let den = num_traits::pow(BigInt::from(d - 2), d);
    Ok(Q::new(num, den))
}

/// What pinning leaves of a hard-core instance: the nodes still free and
/// the number of occupied pins. `None` when two occupied pins are adjacent,
/// i.e. the partition function vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardcoreResidual {
    pub free: Vec<usize>,
    pub occupied: usize,
}

/// Free nodes: not pinned and not adjacent to an occupied pin.
pub fn hardcore_residual(graph: &Graph, pins: &ColorAssignment) -> Option<HardcoreResidual> {
    let mut blocked = vec![false; graph.n()];
    let mut occupied = 0;
    for (u, c) in pins.iter() {
        blocked[u] = true;
        if c == OCCUPIED {
            occupied += 1;
            for &v in graph.neighbors(u) {
                if pins.get(v) == Some(OCCUPIED) {
                    return None;
                }
                blocked[v] = true;
            }
        }
    }
    Some(HardcoreResidual {
        free: (0..graph.n()).filter(|&u| !blocked[u]).collect(),
        occupied,
    })
}

/// Recovers `lambda` from a possibly reduced hard-core decoration and checks
/// that `g` equals `reduce(build_hardcore(structure, lambda), pins)`.
pub fn hardcore_fugacity(g: &DecoratedGraph) -> Result<Q> {
    if g.k() != 2 {
        return Err(Error::NotHardcore(format!("K = {}", g.k())));
    }
    let lambda = (0..g.n())
        .map(|u| g.node_weight(u)[OCCUPIED].clone())
        .max()
        .unwrap_or_else(|| int(0));
    let expected = build_hardcore(g.graph(), &lambda)?.reduce(g.pins())?;
    if &expected != g {
        return Err(Error::NotHardcore(
            "weights differ from (1, lambda) with matrix [[1,1],[1,0]]".into(),
        ));
    }
    Ok(lambda)
}
