mod common;

use common::tg;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zf_core::exact::{Budget, RhoOptions};
use zf_core::graph::{ColorAssignment, DecoratedGraph, NodeSet};
use zf_core::models::{self, TestGraph, OCCUPIED, UNOCCUPIED};
use zf_core::poly::InterpolationKind::{self, TypeI, TypeII};
use zf_core::pseudo::{
    conditional_pseudo_marginal, interpolation_accuracy, min_admissible_radius, pseudo_marginal, ssm_scan,
    theorem1_check, Theorem1Options,
};
use zf_core::rational::{frac, int};

fn hardcore(t: TestGraph) -> DecoratedGraph {
    models::build_hardcore(&tg(t), &int(1)).unwrap()
}

fn coloring(t: TestGraph) -> DecoratedGraph {
    models::build_proper_coloring(&tg(t), 3).unwrap()
}

fn check(g: &DecoratedGraph, r: usize, kind: InterpolationKind, m: usize) -> zf_core::pseudo::Theorem1Report {
    theorem1_check(g, &NodeSet::single(0), None, r, kind, m, &Theorem1Options::default()).unwrap()
}

#[test]
fn holds_at_admissible_radius() {
    for m in 1..=3 {
        let r1 = check(&hardcore(TestGraph::Path(9)), min_admissible_radius(TypeI, m), TypeI, m);
        assert!(r1.holds && !r1.vacuous && r1.radius_condition, "type1 m={m}");
        let r2 = check(
            &coloring(TestGraph::Path(9)),
            min_admissible_radius(TypeII, m),
            TypeII,
            m,
        );
        assert!(r2.holds && !r2.vacuous, "type2 m={m}");
    }
    let r = check(&coloring(TestGraph::Path(9)), 4, TypeII, 2);
    assert!(r.holds && r.tau_count == 3 && !r.sampled);
}

#[test]
fn type1_needs_two_extra_steps() {
    let g = hardcore(TestGraph::Path(7));
    for m in 1..=3 {
        assert!(check(&g, m + 2, TypeI, m).holds, "m={m}");
        let bad = check(&g, m + 1, TypeI, m);
        assert!(!bad.holds && !bad.radius_condition, "m={m}");
    }
    // The configuration R = m = 3 on path(7) is below the bound.
    let w = check(&g, 3, TypeI, 3).witness.expect("witness");
    assert_ne!(w.lhs, w.rhs);
}

#[test]
fn type1_counterexample_of_radius_m() {
    let g = hardcore(TestGraph::Path(7));
    let sigma = ColorAssignment::single(0, OCCUPIED);
    let rep = theorem1_check(
        &g,
        &NodeSet::single(0),
        Some(&sigma),
        3,
        TypeI,
        2,
        &Theorem1Options::default(),
    )
    .unwrap();
    let w = rep.witness.unwrap();
    assert_eq!(w.tau, ColorAssignment::single(3, OCCUPIED));
    assert_eq!(w.k, 2);
    assert_eq!((w.lhs, w.rhs), (int(2), int(3)));
}

#[test]
fn type2_tight_radius_is_m_plus_one() {
    let g = coloring(TestGraph::Path(7));
    for m in 1..=3 {
        assert!(check(&g, m + 1, TypeII, m).holds, "m={m}");
        assert!(!check(&g, m, TypeII, m).holds, "m={m}");
    }
}

#[test]
fn violation_probe_finds_witness() {
    let rep = check(&hardcore(TestGraph::Path(5)), 1, TypeI, 3);
    assert!(!rep.holds);
    let w = rep.witness.unwrap();
    assert_ne!(w.lhs, w.rhs);
}

#[test]
fn sampled_grid_and_other_models() {
    let opts = Theorem1Options {
        tau_budget: 8,
        samples: 12,
        seed: 4,
    };
    let g = models::build_ising(&tg(TestGraph::Grid { w: 3, h: 3 }), &frac(3, 2), &int(2)).unwrap();
    let rep = theorem1_check(&g, &NodeSet::single(0), None, 2, TypeII, 1, &opts).unwrap();
    assert!(rep.holds && !rep.sampled);
    let hc = models::build_hardcore(&tg(TestGraph::Grid { w: 4, h: 4 }), &frac(1, 2)).unwrap();
    let rep = theorem1_check(&hc, &NodeSet::single(0), None, 3, TypeI, 1, &opts).unwrap();
    assert!(rep.holds && rep.sampled && rep.tau_count <= 12);
    assert_eq!(
        rep,
        theorem1_check(&hc, &NodeSet::single(0), None, 3, TypeI, 1, &opts).unwrap()
    );
}

#[test]
fn conditional_identities() {
    let g = hardcore(TestGraph::Cycle(6));
    let sigma = ColorAssignment::single(0, UNOCCUPIED);
    for kind in [TypeI, TypeII] {
        let a = pseudo_marginal(&g, &sigma, kind, &frac(1, 3), 4).unwrap();
        let b = conditional_pseudo_marginal(&g, &sigma, &ColorAssignment::new(), kind, &frac(1, 3), 4).unwrap();
        assert_eq!(a, b);
        let wider = ColorAssignment::from_pairs([(0, UNOCCUPIED), (2, OCCUPIED)]).unwrap();
        let one = conditional_pseudo_marginal(&g, &sigma, &wider, kind, &int(1), 4).unwrap();
        assert_eq!((one.ratio, one.exponent), (int(1), int(0)));
    }
    let clash = ColorAssignment::single(0, OCCUPIED);
    assert!(conditional_pseudo_marginal(&g, &sigma, &clash, TypeI, &int(1), 2).is_err());
}

#[test]
fn accuracy_tables() {
    let empty = models::build_hardcore(&zf_core::Graph::new(4), &frac(1, 2)).unwrap();
    let rows = interpolation_accuracy(&empty, TypeI, 3, Budget::default()).unwrap();
    assert!(rows[0].relative_error > 0.0);
    // Edgeless: Z(G(z)) = (1 + z/2)^4 is not constant, but Type II is.
    let rows = interpolation_accuracy(&empty, TypeII, 0, Budget::default()).unwrap();
    assert!(rows[0].relative_error < 1e-15);

    let g = models::build_proper_coloring(&tg(TestGraph::Path(6)), 5).unwrap();
    let rows = interpolation_accuracy(&g, TypeII, 12, Budget::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].relative_error < w[0].relative_error);
    }
    assert!(rows[12].relative_error < 1e-6);
}

#[test]
fn edgeless_type1_converges_with_small_lambda() {
    // (1 + z/2)^4 has its root at -2, so truncations converge at z = 1.
    let empty = models::build_hardcore(&zf_core::Graph::new(4), &frac(1, 2)).unwrap();
    let rows = interpolation_accuracy(&empty, TypeI, 20, Budget::default()).unwrap();
    assert!(rows[20].relative_error < 1e-6);
}

#[test]
fn scan_on_path() {
    let g = hardcore(TestGraph::Path(9));
    let rows = ssm_scan(
        &[(int(1), g)],
        &NodeSet::single(4),
        &[1, 2, 3, 4, 5],
        Some((TypeI, 1)),
        &RhoOptions::default(),
    )
    .unwrap();
    assert!(rows[0].rho > int(0));
    assert!(rows[3].rho < rows[0].rho);
    assert_eq!(rows[4].rho, int(0));
    assert_eq!(rows[4].boundary_size, 0);
    for row in &rows {
        if row.radius_condition == Some(true) {
            assert_eq!(row.pseudo_exact_zero, Some(true));
            assert_eq!(row.pseudo_gap, Some(0.0));
        }
    }
    assert_eq!(rows[0].pseudo_exact_zero, Some(false));
}

#[test]
fn random_graphs_hold_at_admissible_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..6 {
        let g = models::erdos_renyi(9, 0.25, &mut rng);
        let hc = models::build_hardcore(&g, &frac(2, 3)).unwrap();
        let col = models::build_proper_coloring(&g, 3).unwrap();
        for m in 1..=2 {
            assert!(check(&hc, min_admissible_radius(TypeI, m), TypeI, m).holds);
            assert!(check(&col, min_admissible_radius(TypeII, m), TypeII, m).holds);
        }
    }
}
