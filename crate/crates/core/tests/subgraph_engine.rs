mod common;

use std::collections::BTreeMap;

use common::{panel, tg};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zf_core::exact::Budget;
use zf_core::models::{self, TestGraph};
use zf_core::poly::type1_polynomial;
use zf_core::rational::{frac, int};
use zf_core::subgraph::{
    all_graphs_up_to_iso, beta_table_type1, connected_induced_subgraphs, connected_induced_subgraphs_by_filter,
    ind_count, ind_product_decompose, ind_sum_additivity_check, product_multipliers, PatternGraph,
};
use zf_core::taylor::power_sums_newton;

fn alpha_table(list: &[PatternGraph]) -> BTreeMap<Vec<u8>, u128> {
    product_multipliers(list)
        .unwrap()
        .into_iter()
        .map(|(k, (_, a))| (k, a))
        .collect()
}

#[test]
fn esu_matches_filter_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [4, 7, 10] {
        for _ in 0..5 {
            let g = models::erdos_renyi(n, 0.35, &mut rng);
            for size in 1..=5 {
                assert_eq!(
                    connected_induced_subgraphs(&g, size, Budget::default()).unwrap(),
                    connected_induced_subgraphs_by_filter(&g, size)
                );
            }
        }
    }
}

#[test]
fn enumeration_budget() {
    let g = tg(TestGraph::Complete(8));
    assert!(connected_induced_subgraphs(&g, 8, Budget(10)).unwrap_err().is_budget());
}

#[test]
fn additivity_on_random_unions() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let dot = PatternGraph::edgeless(1).unwrap();
    for _ in 0..10 {
        let h1 = models::erdos_renyi(5, 0.4, &mut rng);
        let h2 = models::erdos_renyi(5, 0.4, &mut rng);
        assert!(ind_sum_additivity_check(&dot, &h1, &h2).unwrap());
        for f in all_graphs_up_to_iso(4)
            .unwrap()
            .into_iter()
            .filter(PatternGraph::is_connected)
        {
            assert!(ind_sum_additivity_check(&f, &h1, &h2).unwrap());
        }
    }
    let big = PatternGraph::from_graph(&tg(TestGraph::Path(6))).unwrap();
    let small = tg(TestGraph::Path(3));
    assert!(ind_sum_additivity_check(&big, &small, &small).unwrap());
    assert_eq!(ind_count(&big, &small).unwrap(), 0);
}

#[test]
fn edge_count_squared() {
    let k2 = PatternGraph::from_edges(2, &[(0, 1)]).unwrap();
    for h in [tg(TestGraph::Cycle(4)), tg(TestGraph::Complete(4))] {
        let d = ind_product_decompose(&[k2.clone(), k2.clone()], &h).unwrap();
        assert!(d.holds(), "{} vs {}", d.lhs, d.rhs);
        assert_eq!(d.lhs, (h.edge_count() * h.edge_count()) as u128);
    }
}

#[test]
fn multipliers_do_not_depend_on_host() {
    let lists = [
        vec![PatternGraph::edgeless(1).unwrap(), PatternGraph::edgeless(1).unwrap()],
        vec![
            PatternGraph::edgeless(2).unwrap(),
            PatternGraph::from_edges(2, &[(0, 1)]).unwrap(),
        ],
        vec![
            PatternGraph::from_graph(&tg(TestGraph::Path(3))).unwrap(),
            PatternGraph::edgeless(1).unwrap(),
        ],
    ];
    let hosts = [
        tg(TestGraph::Grid { w: 3, h: 3 }),
        tg(TestGraph::Complete(5)),
        tg(TestGraph::Cycle(6)),
    ];
    for list in &lists {
        let mut tables = Vec::new();
        for h in &hosts {
            let d = ind_product_decompose(list, h).unwrap();
            assert!(d.holds());
            tables.push(
                d.alphas
                    .into_iter()
                    .map(|(k, (_, a))| (k, a))
                    .collect::<BTreeMap<_, _>>(),
            );
        }
        assert!(tables.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(tables[0], alpha_table(list));
    }
}

#[test]
fn beta_matches_newton_on_panel() {
    for lambda in [int(1), frac(1, 2), frac(7, 3)] {
        for k in 1..=4 {
            let table = beta_table_type1(k, &lambda).unwrap();
            assert!(table.disconnected_nonzero().is_empty(), "k={k}");
            assert!(k == 1 || table.disconnected_count() > 0);
            for (name, g) in panel() {
                let hc = models::build_hardcore(&g, &lambda).unwrap();
                let newton = power_sums_newton(&type1_polynomial(&hc, &lambda).unwrap(), k).unwrap();
                assert_eq!(&table.evaluate(&g).unwrap(), newton.get(k), "{name} k={k}");
            }
        }
    }
}

#[test]
fn second_order_pair_coefficient_vanishes() {
    let t = beta_table_type1(2, &frac(2, 3)).unwrap();
    let pair = PatternGraph::edgeless(2).unwrap().canonical_form();
    assert_eq!(t.entries[&pair].1, int(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_label_invariant(seed in any::<u64>(), n in 1usize..=7, perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = models::erdos_renyi(n, 0.5, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
        let a = PatternGraph::from_graph(&g).unwrap();
        let b = PatternGraph::from_edges(n, &edges).unwrap();
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
    }
}
