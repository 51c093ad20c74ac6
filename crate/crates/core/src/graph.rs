//! Decorated graphs: a simple graph with per-node weight vectors and
//! per-edge `K x K` weight matrices, plus self-reduction by pinning colors.
//!
//! Colors are 0-based inside the library (`0..K`); the text layers shift
//! them to `1..=K`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Undirected simple graph on dense node indices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        for w in [u, v] {
            if w >= n {
                return Err(Error::NodeOutOfRange { node: w, n });
            }
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
        }
        if !self.adj[u].insert(v) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
        }
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn neighbors(&self, u: usize) -> &BTreeSet<usize> {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|nb| nb.contains(&v))
    }

    /// Subgraph induced by `nodes`; node `nodes[i]` becomes `i`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut g = Graph::new(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            for v in &self.adj[u] {
                if let Some(&j) = index.get(v) {
                    if i < j {
                        g.adj[i].insert(j);
                        g.adj[j].insert(i);
                    }
                }
            }
        }
        g
    }

    /// BFS distances from a source set; `None` for unreachable nodes.
    pub fn distances(&self, sources: &NodeSet) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources.iter() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All nodes within distance `r` of `s`.
    pub fn ball(&self, s: &NodeSet, r: usize) -> NodeSet {
        let dist = self.distances(s);
        NodeSet::from_sorted((0..self.n()).filter(|&u| dist[u].is_some_and(|d| d <= r)).collect())
    }

    /// Nodes at distance exactly `r` from `s`. Empty when `r` exceeds the
    /// eccentricity of `s`.
    pub fn boundary(&self, s: &NodeSet, r: usize) -> NodeSet {
        let dist = self.distances(s);
        NodeSet::from_sorted((0..self.n()).filter(|&u| dist[u] == Some(r)).collect())
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|nb| nb.iter().map(|v| v + shift).collect::<BTreeSet<_>>()),
        );
        Graph { adj }
    }
}

/// Sorted, duplicate-free set of node indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new(nodes: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = nodes.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&u| u >= n) {
            return Err(Error::NodeOutOfRange { node: bad, n });
        }
        v.sort_unstable();
        v.dedup();
        Ok(NodeSet(v))
    }

    pub fn single(u: usize) -> Self {
        NodeSet(vec![u])
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        NodeSet(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&u| other.contains(u))
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&u| !other.contains(u))
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Partial map from nodes to colors (`sigma`, `tau`, pins).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorAssignment(BTreeMap<usize, usize>);

impl ColorAssignment {
    pub fn new() -> Self {
        ColorAssignment(BTreeMap::new())
    }

    pub fn single(node: usize, color: usize) -> Self {
        ColorAssignment(BTreeMap::from([(node, color)]))
    }

    /// Builds an assignment, rejecting a node listed twice with different
    /// colors.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut a = ColorAssignment::new();
        for (u, c) in pairs {
            a.insert(u, c)?;
        }
        Ok(a)
    }

    /// Zips a node set with colors in the set's order.
    pub fn on(nodes: &NodeSet, colors: &[usize]) -> Self {
        assert_eq!(nodes.len(), colors.len(), "one color per node");
        ColorAssignment(nodes.iter().copied().zip(colors.iter().copied()).collect())
    }

    pub fn insert(&mut self, node: usize, color: usize) -> Result<()> {
        match self.0.get(&node) {
            Some(&c) if c != color => Err(Error::ConflictingAssignment {
                node,
                first: c,
                second: color,
            }),
            _ => {
                self.0.insert(node, color);
                Ok(())
            }
        }
    }

    pub fn get(&self, node: usize) -> Option<usize> {
        self.0.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&u, &c)| (u, c))
    }

    pub fn domain(&self) -> NodeSet {
        NodeSet(self.0.keys().copied().collect())
    }

    /// Colors in domain order.
    pub fn colors(&self) -> Vec<usize> {
        self.0.values().copied().collect()
    }

    /// `self ∪ other`; fails when they disagree on a shared node.
    pub fn merged(&self, other: &ColorAssignment) -> Result<ColorAssignment> {
        let mut out = self.clone();
        for (u, c) in other.iter() {
            out.insert(u, c)?;
        }
        Ok(out)
    }

    pub fn validate(&self, n: usize, k: usize) -> Result<()> {
        for (u, c) in self.iter() {
            if u >= n {
                return Err(Error::NodeOutOfRange { node: u, n });
            }
            if c >= k {
                return Err(Error::ColorOutOfRange { color: c, k });
            }
        }
        Ok(())
    }

    /// Number of assignments of `k` colors to `nodes`, saturating.
    pub fn count_on(nodes: &NodeSet, k: usize) -> u128 {
        (k as u128).checked_pow(nodes.len() as u32).unwrap_or(u128::MAX)
    }

    /// The `index`-th assignment on `nodes` in mixed-radix order, the first
    /// node being the most significant digit.
    pub fn nth_on(nodes: &NodeSet, k: usize, mut index: u128) -> Self {
        let mut colors = vec![0; nodes.len()];
        for slot in colors.iter_mut().rev() {
            *slot = (index % k as u128) as usize;
            index /= k as u128;
        }
        ColorAssignment::on(nodes, &colors)
    }

    /// Every assignment on `nodes`, in mixed-radix order.
    pub fn all_on(nodes: &NodeSet, k: usize) -> impl Iterator<Item = ColorAssignment> + '_ {
        let total = Self::count_on(nodes, k);
        (0..total).map(move |i| Self::nth_on(nodes, k, i))
    }
}

/// Dense `K x K` matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    k: usize,
    entries: Vec<Q>,
}

impl Matrix {
    pub fn new(k: usize, entries: Vec<Q>) -> Result<Self> {
        if entries.len() != k * k {
            return Err(Error::InvalidGraph(format!(
                "matrix needs {} entries, got {}",
                k * k,
                entries.len()
            )));
        }
        Ok(Matrix { k, entries })
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let entries = (0..k * k).map(|x| f(x / k, x % k)).collect();
        Matrix { k, entries }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.k + j]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.k, |i, j| self.get(j, i).clone())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Q]> {
        self.entries.chunks(self.k)
    }

    fn entries(&self) -> &[Q] {
        &self.entries
    }
}

/// The triplet `(V, E, decoration)`.
///
/// Edge matrices are stored once per edge under the key `(u, v)` with
/// `u < v`; row index is `u`'s color. [`DecoratedGraph::entry`] transposes
/// on reverse access, so `A^(u,v)_ij = A^(v,u)_ji` holds by construction.
///
/// `pins` records every color fixed by [`DecoratedGraph::reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedGraph {
    graph: Graph,
    k: usize,
    node_weights: Vec<Vec<Q>>,
    edge_weights: BTreeMap<(usize, usize), Matrix>,
    pins: ColorAssignment,
}

impl DecoratedGraph {
    pub fn new(
        graph: Graph,
        k: usize,
        node_weights: Vec<Vec<Q>>,
        edge_weights: BTreeMap<(usize, usize), Matrix>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGraph("K must be at least 1".into()));
        }
        if node_weights.len() != graph.n() {
            return Err(Error::InvalidGraph(format!(
                "{} node weight vectors for {} nodes",
                node_weights.len(),
                graph.n()
            )));
        }
        for (u, a) in node_weights.iter().enumerate() {
            if a.len() != k {
                return Err(Error::MismatchedColorCount {
                    left: a.len(),
                    right: k,
                });
            }
            if a.iter().any(Signed::is_negative) {
                return Err(Error::InvalidGraph(format!("negative weight at node {u}")));
            }
        }
        let expected = graph.edges();
        if expected.len() != edge_weights.len() || !expected.iter().all(|e| edge_weights.contains_key(e)) {
            return Err(Error::InvalidGraph(
                "edge matrices must be keyed by exactly the graph's edges (u < v)".into(),
            ));
        }
        for (&(u, v), m) in &edge_weights {
            if m.k() != k {
                return Err(Error::MismatchedColorCount { left: m.k(), right: k });
            }
            if m.entries().iter().any(Signed::is_negative) {
                return Err(Error::InvalidGraph(format!("negative weight on edge ({u}, {v})")));
            }
        }
        Ok(DecoratedGraph {
            graph,
            k,
            node_weights,
            edge_weights,
            pins: ColorAssignment::new(),
        })
    }

    /// Builds a decoration from closures; `edge(u, v)` is called with `u < v`.
    pub fn from_fn(
        graph: Graph,
        k: usize,
        mut node: impl FnMut(usize) -> Vec<Q>,
        mut edge: impl FnMut(usize, usize) -> Matrix,
    ) -> Result<Self> {
        let node_weights = (0..graph.n()).map(&mut node).collect();
        let edge_weights = graph.edges().into_iter().map(|(u, v)| ((u, v), edge(u, v))).collect();
        DecoratedGraph::new(graph, k, node_weights, edge_weights)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_weight(&self, u: usize) -> &[Q] {
        &self.node_weights[u]
    }

    /// Stored matrix for an edge given with `u < v`.
    pub fn edge_matrix(&self, u: usize, v: usize) -> Option<&Matrix> {
        self.edge_weights.get(&(u, v))
    }

    pub fn edge_matrices(&self) -> impl Iterator<Item = ((usize, usize), &Matrix)> {
        self.edge_weights.iter().map(|(&e, m)| (e, m))
    }

    /// `A^(u,v)_ij` for an edge in either orientation.
    pub fn entry(&self, u: usize, v: usize, i: usize, j: usize) -> &Q {
        if u < v {
            self.edge_weights[&(u, v)].get(i, j)
        } else {
            self.edge_weights[&(v, u)].get(j, i)
        }
    }

    pub fn pins(&self) -> &ColorAssignment {
        &self.pins
    }

    /// `L(G) = prod_u sum_i a^u_i`.
    pub fn normalization(&self) -> Q {
        self.node_weights
            .iter()
            .map(|a| a.iter().cloned().fold(Q::zero(), |s, x| s + x))
            .product()
    }

    /// Self-reduction `G_{S,sigma}`: on every edge touching a pinned node the
    /// matrix rows (or columns) of the other colors are zeroed. A pinned node
    /// with no incident edge cannot be reached that way, so its other node
    /// weights are zeroed instead.
    pub fn reduce(&self, assign: &ColorAssignment) -> Result<DecoratedGraph> {
        assign.validate(self.n(), self.k)?;
        let pins = self.pins.merged(assign)?;
        let mut out = self.clone();
        for (&(u, v), m) in out.edge_weights.iter_mut() {
            let (cu, cv) = (assign.get(u), assign.get(v));
            if cu.is_none() && cv.is_none() {
                continue;
            }
            let keep = |i: usize, j: usize| cu.is_none_or(|c| c == i) && cv.is_none_or(|c| c == j);
            *m = Matrix::from_fn(m.k, |i, j| if keep(i, j) { m.get(i, j).clone() } else { Q::zero() });
        }
        for (u, c) in assign.iter() {
            if self.graph.degree(u) == 0 {
                for (i, w) in out.node_weights[u].iter_mut().enumerate() {
                    if i != c {
                        *w = Q::zero();
                    }
                }
            }
        }
        out.pins = pins;
        Ok(out)
    }

    pub fn ball(&self, s: &NodeSet, r: usize) -> NodeSet {
        self.graph.ball(s, r)
    }

    pub fn boundary(&self, s: &NodeSet, r: usize) -> NodeSet {
        self.graph.boundary(s, r)
    }

    /// Same graph with every edge matrix replaced by `f((u, v), A)`.
    /// Entries may become negative, so only evaluators use this.
    pub(crate) fn map_edge_matrices(&self, mut f: impl FnMut((usize, usize), &Matrix) -> Matrix) -> DecoratedGraph {
        let mut out = self.clone();
        for (&e, m) in out.edge_weights.iter_mut() {
            *m = f(e, m);
        }
        out
    }
}

/// `g1 ⊔ g2`, with `g2`'s nodes shifted by `g1.n()`.
pub fn disjoint_union(g1: &DecoratedGraph, g2: &DecoratedGraph) -> Result<DecoratedGraph> {
    if g1.k != g2.k {
        return Err(Error::MismatchedColorCount {
            left: g1.k,
            right: g2.k,
        });
    }
    let shift = g1.n();
    let graph = g1.graph.disjoint_union(&g2.graph);
    let mut node_weights = g1.node_weights.clone();
    node_weights.extend(g2.node_weights.iter().cloned());
    let mut edge_weights = g1.edge_weights.clone();
    edge_weights.extend(
        g2.edge_weights
            .iter()
            .map(|(&(u, v), m)| ((u + shift, v + shift), m.clone())),
    );
    let mut pins = g1.pins.clone();
    for (u, c) in g2.pins.iter() {
        pins.insert(u + shift, c)?;
    }
    Ok(DecoratedGraph {
        graph,
        k: g1.k,
        node_weights,
        edge_weights,
        pins,
    })
}
