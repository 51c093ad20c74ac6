#![allow(dead_code)]

use rand::Rng;
use zf_core::graph::{DecoratedGraph, Graph, Matrix};
use zf_core::models::{self, TestGraph};
use zf_core::rational::{frac, Q};

pub fn tg(t: TestGraph) -> Graph {
    models::build_test_graph(t).unwrap()
}

/// Small nonnegative rational, zero with probability about 1/6.
pub fn random_weight<R: Rng>(rng: &mut R) -> Q {
    frac(rng.gen_range(0..=5), rng.gen_range(1..=3))
}

/// Symmetric-free random decoration: every edge matrix is arbitrary, since
/// orientation is fixed by storage.
pub fn random_decorated<R: Rng>(rng: &mut R, n: usize, k: usize, p: f64) -> DecoratedGraph {
    let graph = models::erdos_renyi(n, p, rng);
    let node: Vec<Vec<Q>> = (0..n).map(|_| (0..k).map(|_| random_weight(rng)).collect()).collect();
    let edges: Vec<Matrix> = graph
        .edges()
        .iter()
        .map(|_| Matrix::from_fn(k, |_, _| random_weight(rng)))
        .collect();
    let mut it = edges.into_iter();
    DecoratedGraph::from_fn(graph, k, |u| node[u].clone(), |_, _| it.next().unwrap()).unwrap()
}

/// Graphs used wherever a fixed panel is wanted (all at most 10 nodes).
pub fn panel() -> Vec<(String, Graph)> {
    [
        TestGraph::Path(1),
        TestGraph::Path(5),
        TestGraph::Path(9),
        TestGraph::Cycle(4),
        TestGraph::Cycle(7),
        TestGraph::Complete(4),
        TestGraph::Grid { w: 3, h: 3 },
        TestGraph::RegularTree { d: 3, depth: 2 },
    ]
    .into_iter()
    .map(|t| (format!("{t:?}"), tg(t)))
    .collect()
}
