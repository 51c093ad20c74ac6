//! Fixed-seed invariant suite. Every check compares two independent
//! computations; any mismatch makes the run exit 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use zf_core::exact::{self, Budget};
use zf_core::io::{graph_to_json, parse_graph_json, LabeledGraph};
use zf_core::models::{self, TestGraph, OCCUPIED};
use zf_core::poly::{self, InterpolationKind};
use zf_core::pseudo::{self, Theorem1Options};
use zf_core::rational::frac;
use zf_core::subgraph::{self, PatternGraph};
use zf_core::taylor;
use zf_core::{elimination, ColorAssignment, DecoratedGraph, Graph, Matrix, NodeSet};

use crate::commands::Report;
use crate::{CliError, Format, OutputArgs};

const DEFAULT_SEED: u64 = 20_240_601;
const ROUNDS: usize = 12;

fn random_decorated(rng: &mut ChaCha8Rng, n: usize, k: usize) -> zf_core::Result<DecoratedGraph> {
    let g = models::erdos_renyi(n, 0.5, rng);
    let w = |rng: &mut ChaCha8Rng| frac(rng.gen_range(0..4), rng.gen_range(1..4));
    let nodes: Vec<Vec<_>> = (0..n).map(|_| (0..k).map(|_| w(rng)).collect()).collect();
    let edges: Vec<Matrix> = g.edges().iter().map(|_| Matrix::from_fn(k, |_, _| w(rng))).collect();
    let mut edge_iter = edges.into_iter();
    DecoratedGraph::from_fn(
        g,
        k,
        |u| nodes[u].clone(),
        |_, _| edge_iter.next().expect("one per edge"),
    )
}

fn path(n: usize) -> zf_core::Result<Graph> {
    models::build_test_graph(TestGraph::Path(n))
}

struct Suite {
    checks: Vec<Value>,
    failed: usize,
}

impl Suite {
    fn record(&mut self, name: &str, outcome: zf_core::Result<bool>) {
        let (pass, detail) = match outcome {
            Ok(p) => (p, Value::Null),
            Err(e) => (false, json!(e.to_string())),
        };
        if !pass {
            self.failed += 1;
        }
        self.checks.push(json!({ "name": name, "pass": pass, "error": detail }));
    }
}

pub fn run(o: &OutputArgs) -> Result<Report, CliError> {
    let seed = o.seed.unwrap_or(DEFAULT_SEED);
    let budget = Budget::from_env();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = Suite {
        checks: Vec::new(),
        failed: 0,
    };

    let mut randoms = Vec::new();
    for _ in 0..ROUNDS {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3);
        randoms.push(random_decorated(&mut rng, n, k).map_err(CliError::from)?);
    }

    suite.record(
        "enumeration_matches_elimination",
        randoms.iter().try_fold(true, |ok, g| {
            Ok(ok && exact::partition_exact_within(g, budget)? == elimination::partition_by_elimination(g))
        }),
    );

    suite.record(
        "marginal_matches_ratio_of_reduced_partitions",
        randoms.iter().try_fold(true, |ok, g| {
            if exact::partition_exact_within(g, budget)? == frac(0, 1) {
                return Ok(ok);
            }
            let sigma = ColorAssignment::single(0, g.k() - 1);
            Ok(ok && exact::marginal_within(g, &sigma, budget)? == exact::marginal_by_ratio(g, &sigma, budget)?)
        }),
    );

    suite.record(
        "type2_lagrange_matches_expansion",
        randoms.iter().try_fold(true, |ok, g| {
            Ok(ok && poly::type2_polynomial(g) == poly::type2_polynomial_by_expansion(g, budget)?)
        }),
    );

    let hardcore: Vec<DecoratedGraph> = randoms
        .iter()
        .enumerate()
        .map(|(i, g)| models::build_hardcore(g.graph(), &frac(1 + i as i64, 3)))
        .collect::<zf_core::Result<_>>()
        .map_err(CliError::from)?;

    suite.record(
        "type1_counts_match_enumeration",
        hardcore.iter().try_fold(true, |ok, g| {
            let lambda = models::hardcore_fugacity(g)?;
            Ok(ok && poly::type1_polynomial(g, &lambda)? == poly::type1_polynomial_by_enumeration(g, budget)?)
        }),
    );

    suite.record(
        "newton_matches_girard",
        randoms.iter().try_fold(true, |ok, g| {
            let p = poly::type2_polynomial(g);
            if p.coeff(0) == frac(0, 1) {
                return Ok(ok);
            }
            Ok(ok && taylor::power_sums_newton(&p, 5)? == taylor::power_sums_girard(&p, 5)?)
        }),
    );

    suite.record(
        "power_sums_add_over_disjoint_union",
        randoms.windows(2).try_fold(true, |ok, w| {
            let lambda = frac(2, 3);
            let g1 = models::build_hardcore(w[0].graph(), &lambda)?;
            let g2 = models::build_hardcore(w[1].graph(), &lambda)?;
            Ok(ok
                && taylor::power_sums_additive_check(&g1, &g2, InterpolationKind::TypeI, 4)?
                && (w[0].k() != w[1].k()
                    || w.iter().any(|g| poly::type2_polynomial(g).coeff(0) == frac(0, 1))
                    || taylor::power_sums_additive_check(&w[0], &w[1], InterpolationKind::TypeII, 4)?))
        }),
    );

    let p7 = path(7).map_err(CliError::from)?;
    let hc7 = models::build_hardcore(&p7, &frac(1, 2)).map_err(CliError::from)?;
    let s = NodeSet::single(0);
    for kind in [InterpolationKind::TypeI, InterpolationKind::TypeII] {
        let m = 2;
        let r = pseudo::min_admissible_radius(kind, m);
        let name = format!("boundary_independence_{}_at_admissible_radius", kind.as_str());
        suite.record(
            &name,
            pseudo::theorem1_check(&hc7, &s, None, r, kind, m, &Theorem1Options::default()).map(|rep| rep.holds),
        );
    }

    suite.record(
        "type1_radius_bound_is_tight",
        pseudo::theorem1_check(
            &hc7,
            &s,
            Some(&ColorAssignment::single(0, OCCUPIED)),
            3,
            InterpolationKind::TypeI,
            2,
            &Theorem1Options::default(),
        )
        .map(|rep| !rep.holds),
    );

    suite.record(
        "induced_counts_add_over_disjoint_union",
        (|| {
            let f = PatternGraph::from_graph(&path(3)?)?;
            let h1 = models::build_test_graph(TestGraph::Cycle(5))?;
            let h2 = models::build_test_graph(TestGraph::Grid { w: 2, h: 3 })?;
            subgraph::ind_sum_additivity_check(&f, &h1, &h2)
        })(),
    );

    suite.record(
        "induced_product_decomposition",
        (|| {
            let list = [PatternGraph::edgeless(1)?, PatternGraph::from_graph(&path(2)?)?];
            let h = models::build_test_graph(TestGraph::Grid { w: 3, h: 3 })?;
            Ok(subgraph::ind_product_decompose(&list, &h)?.holds())
        })(),
    );

    suite.record(
        "beta_vanishes_on_disconnected_and_matches_newton",
        (|| {
            let lambda = frac(1, 2);
            let table = subgraph::beta_table_type1(3, &lambda)?;
            let h = models::build_test_graph(TestGraph::Cycle(6))?;
            let hc = models::build_hardcore(&h, &lambda)?;
            let newton = taylor::power_sums_newton(&poly::type1_polynomial(&hc, &lambda)?, 3)?;
            Ok(table.disconnected_nonzero().is_empty() && &table.evaluate(&h)? == newton.get(3))
        })(),
    );

    suite.record(
        "graph_json_round_trip",
        randoms.iter().try_fold(true, |ok, g| {
            let lg = LabeledGraph::with_index_ids(g.clone());
            Ok(ok && parse_graph_json(&graph_to_json(&lg))? == lg)
        }),
    );

    let total = suite.checks.len();
    let failure = (suite.failed > 0).then(|| format!("{} of {total} checks failed", suite.failed));
    Ok(Report {
        json: json!({
            "seed": seed,
            "checks": suite.checks,
            "passed": total - suite.failed,
            "failed": suite.failed,
        }),
        csv: None,
        default: Format::Json,
        failure,
    })
}
