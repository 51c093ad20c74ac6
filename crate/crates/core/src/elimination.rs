//! Exact partition functions by variable elimination over factor tables.
//!
//! Cost is `K^(width+1)` per step for the induced width of a greedy
//! min-degree order, so paths, cycles, trees and small grids are cheap.
//! Entries may be negative, which the interpolation points need.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::graph::DecoratedGraph;
use crate::rational::Q;

/// Table over `vars` (sorted), mixed radix with the first variable most
/// significant.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<Q>,
}

impl Factor {
    fn index(&self, k: usize, assignment: impl Fn(usize) -> usize) -> usize {
        self.vars.iter().fold(0, |acc, &v| acc * k + assignment(v))
    }
}

/// Multiplies `factors` and sums out `x`.
fn eliminate(factors: &[Factor], x: usize, k: usize) -> Factor {
    let vars: Vec<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&v| v != x)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let size = k.pow(vars.len() as u32);
    let mut table = Vec::with_capacity(size);
    let mut colors = vec![0usize; vars.len()];
    for idx in 0..size {
        let mut rest = idx;
        for slot in colors.iter_mut().rev() {
            *slot = rest % k;
            rest /= k;
        }
        let lookup = |v: usize, cx: usize| -> usize {
            if v == x {
                cx
            } else {
                colors[vars.binary_search(&v).expect("var in scope")]
            }
        };
        let mut sum = Q::zero();
        for cx in 0..k {
            let mut prod = Q::one();
            for f in factors {
                let e = &f.table[f.index(k, |v| lookup(v, cx))];
                if e.is_zero() {
                    prod = Q::zero();
                    break;
                }
                prod *= e;
            }
            sum += prod;
        }
        table.push(sum);
    }
    Factor { vars, table }
}

/// `Z(G)` by eliminating nodes in greedy min-degree order (ties to the
/// smallest index).
pub fn partition_by_elimination(g: &DecoratedGraph) -> Q {
    let k = g.k();
    let mut factors: Vec<Factor> = (0..g.n())
        .map(|u| Factor {
            vars: vec![u],
            table: g.node_weight(u).to_vec(),
        })
        .collect();
    for ((u, v), m) in g.edge_matrices() {
        factors.push(Factor {
            vars: vec![u, v],
            table: m.rows().flatten().cloned().collect(),
        });
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..g.n()).map(|u| g.graph().neighbors(u).clone()).collect();
    let mut alive: BTreeSet<usize> = (0..g.n()).collect();
    while let Some(&x) = alive.iter().min_by_key(|&&u| (adj[u].len(), u)) {
        alive.remove(&x);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        factors.push(eliminate(&touching, x, k));
        let nb: Vec<usize> = adj[x].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&x);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[x].clear();
    }
    factors
        .iter()
        .map(|f| {
            debug_assert!(f.vars.is_empty());
            f.table[0].clone()
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::partition_exact;
    use crate::models::{self, TestGraph};
    use crate::rational::{frac, int};

    #[test]
    fn agrees_with_enumeration_on_small_models() {
        for t in [
            TestGraph::Path(6),
            TestGraph::Cycle(5),
            TestGraph::Complete(4),
            TestGraph::Grid { w: 3, h: 2 },
        ] {
            let g = models::build_test_graph(t).unwrap();
            for d in [
                models::build_hardcore(&g, &frac(2, 3)).unwrap(),
                models::build_proper_coloring(&g, 3).unwrap(),
                models::build_ising(&g, &frac(1, 2), &int(3)).unwrap(),
            ] {
                assert_eq!(partition_by_elimination(&d), partition_exact(&d).unwrap(), "{t:?}");
            }
        }
    }

    #[test]
    fn empty_graph_is_one() {
        let g = models::build_hardcore(&crate::graph::Graph::new(0), &int(1)).unwrap();
        assert_eq!(partition_by_elimination(&g), int(1));
    }
}
