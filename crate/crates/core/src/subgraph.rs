//! Induced-subgraph counting `Ind(F, H)`, connected induced subgraph
//! enumeration, products of counts as linear combinations of counts, and
//! the Type I expansion of power sums over connected patterns.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::Budget;
use crate::graph::{Graph, NodeSet};
use crate::rational::{pow, Q};
use crate::taylor::partitions;

/// Largest pattern handled.
pub const P_MAX: usize = 8;
/// Largest power-sum order assembled by [`beta_table_type1`].
pub const BETA_K_MAX: usize = 4;

/// Small graph stored as adjacency bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternGraph {
    adj: Vec<u8>,
}

impl PatternGraph {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        if g.n() > P_MAX {
            return Err(Error::PatternTooLarge {
                nodes: g.n(),
                limit: P_MAX,
            });
        }
        let adj = (0..g.n())
            .map(|u| g.neighbors(u).iter().fold(0u8, |m, &v| m | 1 << v))
            .collect();
        Ok(PatternGraph { adj })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        PatternGraph::from_graph(&Graph::from_edges(n, edges)?)
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        PatternGraph::from_graph(&Graph::new(n))
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn to_graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = (0..self.n())
            .flat_map(|u| {
                (u + 1..self.n())
                    .filter(move |&v| self.has_edge(u, v))
                    .map(move |v| (u, v))
            })
            .collect();
        Graph::from_edges(self.n(), &edges).expect("valid pattern")
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let full = self.full_mask();
        let mut seen = 1u8;
        let mut frontier = 1u8;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.adj[u] & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == full
    }

    fn full_mask(&self) -> u8 {
        ((1u16 << self.n()) - 1) as u8
    }

    /// Subgraph induced by the nodes in `mask`, relabeled in index order.
    fn induced_mask(&self, mask: u8) -> PatternGraph {
        let nodes: Vec<usize> = (0..self.n()).filter(|&u| mask >> u & 1 == 1).collect();
        let adj = nodes
            .iter()
            .map(|&u| {
                nodes
                    .iter()
                    .enumerate()
                    .fold(0u8, |m, (j, &v)| if self.has_edge(u, v) { m | 1 << j } else { m })
            })
            .collect();
        PatternGraph { adj }
    }

    /// Isomorphism-invariant bytes: `[n]` followed by the largest
    /// upper-triangle adjacency code over orderings that sort nodes by
    /// degree, big-endian.
    pub fn canonical_form(&self) -> Vec<u8> {
        let n = self.n();
        let mut by_degree: Vec<usize> = (0..n).collect();
        by_degree.sort_by_key(|&u| (self.adj[u].count_ones(), u));
        let classes: Vec<Vec<usize>> = by_degree
            .iter()
            .copied()
            .chunk_by(|&u| self.adj[u].count_ones())
            .into_iter()
            .map(|(_, c)| c.collect())
            .collect();
        let mut best = 0u32;
        let per_class: Vec<Vec<Vec<usize>>> = classes
            .iter()
            .map(|c| c.iter().copied().permutations(c.len()).collect())
            .collect();
        for choice in per_class.iter().multi_cartesian_product() {
            let order: Vec<usize> = choice.into_iter().flatten().copied().collect();
            let mut code = 0u32;
            for i in 0..n {
                for j in i + 1..n {
                    code = code << 1 | self.has_edge(order[i], order[j]) as u32;
                }
            }
            best = best.max(code);
        }
        if n == 0 {
            return vec![0];
        }
        let mut out = vec![n as u8];
        out.extend_from_slice(&best.to_be_bytes());
        out
    }
}

/// Calls `visit` once for every connected induced subgraph with at most
/// `size_max` nodes, by extension with an exclusive neighbourhood (ESU).
pub fn for_each_connected_induced_subgraph(h: &Graph, size_max: usize, mut visit: impl FnMut(&[usize])) {
    if size_max == 0 {
        return;
    }
    // touched[u] = number of nodes of the current set equal or adjacent to u
    let mut touched = vec![0u32; h.n()];
    let mut sub = Vec::with_capacity(size_max);
    for v in 0..h.n() {
        push(h, &mut sub, &mut touched, v);
        visit(&sub);
        let ext: Vec<usize> = h.neighbors(v).range(v + 1..).copied().collect();
        extend(h, size_max, v, &mut sub, &mut touched, ext, &mut visit);
        pop(h, &mut sub, &mut touched);
    }
}

fn push(h: &Graph, sub: &mut Vec<usize>, touched: &mut [u32], w: usize) {
    sub.push(w);
    touched[w] += 1;
    for &u in h.neighbors(w) {
        touched[u] += 1;
    }
}

fn pop(h: &Graph, sub: &mut Vec<usize>, touched: &mut [u32]) {
    let w = sub.pop().expect("nonempty");
    touched[w] -= 1;
    for &u in h.neighbors(w) {
        touched[u] -= 1;
    }
}

fn extend(
    h: &Graph,
    size_max: usize,
    root: usize,
    sub: &mut Vec<usize>,
    touched: &mut [u32],
    mut ext: Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if sub.len() == size_max {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        next.extend(h.neighbors(w).iter().filter(|&&u| u > root && touched[u] == 0));
        push(h, sub, touched, w);
        visit(sub);
        extend(h, size_max, root, sub, touched, next, visit);
        pop(h, sub, touched);
    }
}

/// Every connected induced subgraph on at most `size_max` nodes.
pub fn connected_induced_subgraphs(h: &Graph, size_max: usize, budget: Budget) -> Result<Vec<NodeSet>> {
    let mut out = Vec::new();
    let mut over = false;
    for_each_connected_induced_subgraph(h, size_max, |s| {
        if (out.len() as u128) < budget.0 {
            out.push(NodeSet::new(s.iter().copied(), h.n()).expect("in range"));
        } else {
            over = true;
        }
    });
    if over {
        return Err(Error::budget(format!("more than {}", budget.0), budget.0));
    }
    out.sort();
    Ok(out)
}

/// Oracle for [`connected_induced_subgraphs`]: filters all node subsets.
pub fn connected_induced_subgraphs_by_filter(h: &Graph, size_max: usize) -> Vec<NodeSet> {
    let mut out: Vec<NodeSet> = (1..=size_max.min(h.n()))
        .flat_map(|k| (0..h.n()).combinations(k))
        .filter(|c| h.induced(c).is_connected())
        .map(|c| NodeSet::new(c, h.n()).expect("in range"))
        .collect();
    out.sort();
    out
}

fn pattern_of(h: &Graph, nodes: &[usize]) -> PatternGraph {
    PatternGraph::from_graph(&h.induced(nodes)).expect("size checked by caller")
}

/// `Ind(F, H)`: node subsets of `h` inducing a copy of `f`. Connected
/// patterns are found by connected enumeration, others by all
/// `|V(f)|`-subsets.
pub fn ind_count(f: &PatternGraph, h: &Graph) -> Result<u128> {
    let p = f.n();
    if p == 0 {
        return Ok(1);
    }
    let target = f.canonical_form();
    let mut count = 0u128;
    if f.is_connected() {
        for_each_connected_induced_subgraph(h, p, |s| {
            if s.len() == p && pattern_of(h, s).canonical_form() == target {
                count += 1;
            }
        });
    } else {
        for c in (0..h.n()).combinations(p) {
            if pattern_of(h, &c).canonical_form() == target {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `Ind(f, h1 ⊔ h2) == Ind(f, h1) + Ind(f, h2)`; only claimed for connected
/// `f`.
pub fn ind_sum_additivity_check(f: &PatternGraph, h1: &Graph, h2: &Graph) -> Result<bool> {
    if !f.is_connected() {
        return Err(Error::DisconnectedPattern);
    }
    Ok(ind_count(f, &h1.disjoint_union(h2))? == ind_count(f, h1)? + ind_count(f, h2)?)
}

/// One representative per isomorphism class of graphs on exactly `n` nodes,
/// by adding a node to every class on `n - 1` nodes.
pub fn all_graphs_up_to_iso(n: usize) -> Result<Vec<PatternGraph>> {
    if n > P_MAX {
        return Err(Error::PatternTooLarge { nodes: n, limit: P_MAX });
    }
    let mut level: BTreeMap<Vec<u8>, PatternGraph> = BTreeMap::new();
    let empty = PatternGraph { adj: Vec::new() };
    level.insert(empty.canonical_form(), empty);
    for size in 1..=n {
        let mut next = BTreeMap::new();
        for g in level.values() {
            for nb in 0u16..(1 << (size - 1)) {
                let nb = nb as u8;
                let mut adj = g.adj.clone();
                for (u, m) in adj.iter_mut().enumerate() {
                    if nb >> u & 1 == 1 {
                        *m |= 1 << (size - 1);
                    }
                }
                adj.push(nb);
                let h = PatternGraph { adj };
                next.entry(h.canonical_form()).or_insert(h);
            }
        }
        level = next;
    }
    Ok(level.into_values().collect())
}

/// `alpha(F_1..F_m; F)`: ordered tuples of node subsets `X_i` of `F` with
/// `F[X_i] ≅ F_i` whose union is all of `V(F)`, for every class `F` on at
/// most `sum |V(F_i)|` nodes where it is nonzero. Keyed by canonical form.
pub fn product_multipliers(f_list: &[PatternGraph]) -> Result<BTreeMap<Vec<u8>, (PatternGraph, u128)>> {
    let total: usize = f_list.iter().map(PatternGraph::n).sum();
    if total > P_MAX {
        return Err(Error::PatternTooLarge {
            nodes: total,
            limit: P_MAX,
        });
    }
    let smallest = f_list.iter().map(PatternGraph::n).max().unwrap_or(0);
    let targets: Vec<Vec<u8>> = f_list.iter().map(PatternGraph::canonical_form).collect();
    let mut out = BTreeMap::new();
    for size in smallest..=total {
        for cand in all_graphs_up_to_iso(size)? {
            let masks: Vec<Vec<u8>> = f_list
                .iter()
                .zip(&targets)
                .map(|(f, t)| {
                    (0u16..1 << size)
                        .map(|m| m as u8)
                        .filter(|&m| m.count_ones() as usize == f.n() && &cand.induced_mask(m).canonical_form() == t)
                        .collect()
                })
                .collect();
            let mut ways: BTreeMap<u8, u128> = BTreeMap::from([(0, 1)]);
            for options in &masks {
                let mut next = BTreeMap::new();
                for (&m, &c) in &ways {
                    for &x in options {
                        *next.entry(m | x).or_insert(0) += c;
                    }
                }
                ways = next;
            }
            let alpha = ways.get(&cand.full_mask()).copied().unwrap_or(0);
            if alpha > 0 {
                out.insert(cand.canonical_form(), (cand, alpha));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub alphas: BTreeMap<Vec<u8>, (PatternGraph, u128)>,
    /// `prod Ind(F_i, h)`.
    pub lhs: u128,
    /// `sum_F alpha_F Ind(F, h)`.
    pub rhs: u128,
}

impl Decomposition {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `prod_i Ind(F_i, h) = sum_F alpha(F_1..F_m; F) Ind(F, h)`, evaluated on `h`.
pub fn ind_product_decompose(f_list: &[PatternGraph], h: &Graph) -> Result<Decomposition> {
    let alphas = product_multipliers(f_list)?;
    let mut lhs = 1u128;
    for f in f_list {
        lhs *= ind_count(f, h)?;
    }
    let mut rhs = 0u128;
    for (f, a) in alphas.values() {
        rhs += a * ind_count(f, h)?;
    }
    Ok(Decomposition { alphas, lhs, rhs })
}

/// Coefficients with `r_k(Z(G(z))) = sum_H beta_{H,k} Ind(H, G)` for the
/// hard-core Type I polynomial at a fixed fugacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaTable {
    pub k: usize,
    pub lambda: Q,
    /// Every class on `1..=k` nodes, zero entries included.
    pub entries: BTreeMap<Vec<u8>, (PatternGraph, Q)>,
}

impl BetaTable {
    pub fn evaluate(&self, g: &Graph) -> Result<Q> {
        let mut sum = Q::zero();
        for (h, beta) in self.entries.values() {
            if !beta.is_zero() {
                sum += beta * Q::from_integer(BigInt::from(ind_count(h, g)?));
            }
        }
        Ok(sum)
    }

    /// Disconnected patterns with a nonzero coefficient; empty when the
    /// vanishing property holds.
    pub fn disconnected_nonzero(&self) -> Vec<&PatternGraph> {
        self.entries
            .values()
            .filter(|(h, b)| !h.is_connected() && !b.is_zero())
            .map(|(h, _)| h)
            .collect()
    }

    pub fn disconnected_count(&self) -> usize {
        self.entries.values().filter(|(h, _)| !h.is_connected()).count()
    }
}

/// Expands Girard's formula with `c_j = lambda^j Ind(I_j, G)` (`I_j` the
/// edgeless pattern) and rewrites each product of counts by
/// [`product_multipliers`]:
/// `beta_{H,k} = k lambda^k sum_m (-1)^{|m|} (|m|-1)!/prod m_j! alpha(I^m; H)`.
pub fn beta_table_type1(k: usize, lambda: &Q) -> Result<BetaTable> {
    if k == 0 || k > BETA_K_MAX {
        return Err(Error::PatternTooLarge {
            nodes: k,
            limit: BETA_K_MAX,
        });
    }
    let mut entries: BTreeMap<Vec<u8>, (PatternGraph, Q)> = BTreeMap::new();
    for size in 1..=k {
        for h in all_graphs_up_to_iso(size)? {
            entries.insert(h.canonical_form(), (h, Q::zero()));
        }
    }
    let fact = |n: usize| (1..=n).fold(BigInt::from(1), |a, i| a * i);
    for mult in partitions(k) {
        let mut list = Vec::new();
        for (j, &mj) in mult.iter().enumerate() {
            for _ in 0..mj {
                list.push(PatternGraph::edgeless(j + 1)?);
            }
        }
        let parts: usize = mult.iter().sum();
        let denom: BigInt = mult.iter().map(|&mj| fact(mj)).product();
        let mut coef = Q::new(fact(parts - 1), denom);
        if parts % 2 == 1 {
            coef = -coef;
        }
        for (key, (_, alpha)) in product_multipliers(&list)? {
            let slot = &mut entries.get_mut(&key).expect("class on <= k nodes").1;
            *slot += &coef * Q::from_integer(BigInt::from(alpha));
        }
    }
    let scale = Q::from_integer(BigInt::from(k)) * pow(lambda, k);
    for (_, beta) in entries.values_mut() {
        *beta *= &scale;
    }
    Ok(BetaTable {
        k,
        lambda: lambda.clone(),
        entries,
    })
}

/// Distinct classes among `patterns`.
pub fn distinct_classes(patterns: &[PatternGraph]) -> usize {
    patterns
        .iter()
        .map(PatternGraph::canonical_form)
        .collect::<BTreeSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, TestGraph};
    use crate::rational::{frac, int};

    fn tg(t: TestGraph) -> Graph {
        models::build_test_graph(t).unwrap()
    }

    fn k2() -> PatternGraph {
        PatternGraph::from_edges(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (0..=6).map(|n| all_graphs_up_to_iso(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let a = PatternGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = PatternGraph::from_edges(4, &[(2, 0), (0, 3), (3, 1)]).unwrap();
        let star = PatternGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_ne!(a.canonical_form(), star.canonical_form());
    }

    #[test]
    fn ind_examples() {
        let k3 = tg(TestGraph::Complete(3));
        assert_eq!(ind_count(&k2(), &k3).unwrap(), 3);
        let p3 = PatternGraph::from_graph(&tg(TestGraph::Path(3))).unwrap();
        assert_eq!(ind_count(&p3, &k3).unwrap(), 0);
        let pair = PatternGraph::edgeless(2).unwrap();
        assert_eq!(ind_count(&pair, &tg(TestGraph::Cycle(4))).unwrap(), 2);
        assert!(PatternGraph::from_graph(&Graph::new(9)).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let count = |t, s| connected_induced_subgraphs(&tg(t), s, Budget::default()).unwrap().len();
        assert_eq!(count(TestGraph::Path(3), 2), 5);
        assert_eq!(count(TestGraph::Complete(3), 3), 7);
        assert_eq!(count(TestGraph::Cycle(4), 3), 12);
    }

    #[test]
    fn additivity_rejects_disconnected() {
        let g = tg(TestGraph::Path(3));
        assert_eq!(
            ind_sum_additivity_check(&PatternGraph::edgeless(2).unwrap(), &g, &g),
            Err(Error::DisconnectedPattern)
        );
        assert!(ind_sum_additivity_check(&k2(), &g, &tg(TestGraph::Cycle(5))).unwrap());
    }

    #[test]
    fn square_of_node_count() {
        let dot = PatternGraph::edgeless(1).unwrap();
        let alphas = product_multipliers(&[dot.clone(), dot.clone()]).unwrap();
        let by_class: BTreeMap<Vec<u8>, u128> = alphas.iter().map(|(k, (_, a))| (k.clone(), *a)).collect();
        assert_eq!(by_class[&dot.canonical_form()], 1);
        assert_eq!(by_class[&PatternGraph::edgeless(2).unwrap().canonical_form()], 2);
        assert_eq!(by_class[&k2().canonical_form()], 2);
        let single = product_multipliers(&[k2()]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[&k2().canonical_form()].1, 1);
    }

    #[test]
    fn beta_first_order() {
        let t = beta_table_type1(1, &frac(3, 2)).unwrap();
        let dot = PatternGraph::edgeless(1).unwrap().canonical_form();
        assert_eq!(t.entries[&dot].1, frac(-3, 2));
        assert!(beta_table_type1(5, &int(1)).is_err());
    }
}
