//! One line per acceptance criterion. Exits nonzero if any criterion fails,
//! except those listed in `KNOWN_UNATTAINABLE`, which are still run and
//! reported as FAIL.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zf_core::exact::{self, Budget, RhoOptions};
use zf_core::models::{self, TestGraph};
use zf_core::poly::{self, InterpolationKind, InterpolationKind::*, RationalPolynomial};
use zf_core::pseudo::{self, Theorem1Options};
use zf_core::rational::{frac, int, to_f64, Q};
use zf_core::subgraph;
use zf_core::taylor::{power_sums_girard, power_sums_newton};
use zf_core::{disjoint_union, ColorAssignment, DecoratedGraph, Graph, Matrix, NodeSet};

/// K4 hard-core at lambda = 1/2: `Z(G(z)) = 1 + 2z` vanishes at `z = -1/2`,
/// inside the unit disc, so the truncations at `z = 1` diverge.
const KNOWN_UNATTAINABLE: &[u32] = &[6];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tg(t: TestGraph) -> Graph {
    models::build_test_graph(t).unwrap()
}

fn weight(rng: &mut ChaCha8Rng) -> Q {
    frac(rng.gen_range(0..=5), rng.gen_range(1..=3))
}

fn random_decorated(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DecoratedGraph {
    let graph = models::erdos_renyi(n, 0.5, rng);
    let node: Vec<Vec<Q>> = (0..n).map(|_| (0..k).map(|_| weight(rng)).collect()).collect();
    let edges: Vec<Matrix> = graph
        .edges()
        .iter()
        .map(|_| Matrix::from_fn(k, |_, _| weight(rng)))
        .collect();
    let mut it = edges.into_iter();
    DecoratedGraph::from_fn(graph, k, |u| node[u].clone(), |_, _| it.next().unwrap()).unwrap()
}

fn panel() -> Vec<(String, Graph)> {
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

fn exact_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let budget = Budget::default();
    let mut nonzero = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=7);
        let k = rng.gen_range(1..=3);
        let n1 = rng.gen_range(0..=n);
        let g1 = random_decorated(&mut rng, n1, k);
        let g2 = random_decorated(&mut rng, n - n1, k);
        let g = disjoint_union(&g1, &g2).unwrap();
        let z = exact::partition_exact_within(&g, budget).unwrap();
        let z1 = exact::partition_exact_within(&g1, budget).unwrap();
        let z2 = exact::partition_exact_within(&g2, budget).unwrap();
        ensure(z == &z1 * &z2, || format!("case {case}: Z does not factorize"))?;
        if z.is_zero() {
            continue;
        }
        nonzero += 1;
        let s = NodeSet::new((0..n).filter(|_| rng.gen_bool(0.4)).take(3), n).unwrap();
        let table = exact::marginal_table(&g, &s, budget).unwrap();
        ensure(table.total().is_one(), || {
            format!("case {case}: marginals sum to {}", table.total())
        })?;
        for sigma in ColorAssignment::all_on(&s, k) {
            let direct = exact::marginal_within(&g, &sigma, budget).unwrap();
            let ratio = exact::partition_exact_within(&g.reduce(&sigma).unwrap(), budget).unwrap() / &z;
            ensure(direct == ratio, || {
                format!("case {case}: marginal {direct} vs ratio {ratio}")
            })?;
        }
    }
    Ok(format!("200 graphs, {nonzero} with Z != 0"))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> RationalPolynomial {
    let mut c: Vec<Q> = (0..=deg)
        .map(|_| frac(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
        .collect();
    if c[0].is_zero() {
        c[0] = int(1);
    }
    RationalPolynomial::new(c)
}

fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let monic: Vec<f64> = coeffs.iter().map(|c| c / coeffs[n]).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c);
    let deriv = |z: Complex64| {
        (1..=n)
            .rev()
            .fold(Complex64::zero(), |acc, i| acc * z + monic[i] * i as f64)
    };
    let mut roots: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.4, 0.9).powu(i as u32)).collect();
    for _ in 0..2000 {
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::one(), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

fn power_sum_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..100 {
        let deg = rng.gen_range(0..=10);
        let p = random_poly(&mut rng, deg);
        ensure(
            power_sums_newton(&p, 10).unwrap() == power_sums_girard(&p, 10).unwrap(),
            || format!("case {case}: Newton and Girard differ on {p}"),
        )?;
    }
    for case in 0..50 {
        let deg = rng.gen_range(1..=8);
        let roots: Vec<Q> = (0..deg)
            .map(|_| frac(rng.gen_range(1..=7), rng.gen_range(1..=4)) * int(if rng.gen_bool(0.5) { -1 } else { 1 }))
            .collect();
        let p = roots
            .iter()
            .fold(RationalPolynomial::constant(frac(rng.gen_range(1..=5), 3)), |p, r| {
                p.mul(&RationalPolynomial::new(vec![-r.clone(), Q::one()]))
            });
        let newton = power_sums_newton(&p, 8).unwrap();
        for k in 1..=8 {
            let direct = roots.iter().fold(Q::zero(), |s, r| s + num_traits::pow(r.recip(), k));
            ensure(newton.get(k) == &direct, || format!("planted case {case}, k={k}"))?;
        }
    }
    let mut worst = 0.0f64;
    for case in 0..60 {
        let deg = rng.gen_range(1..=6);
        let p = random_poly(&mut rng, deg);
        let f: Vec<f64> = p.coeffs().iter().map(to_f64).collect();
        let roots = durand_kerner(&f);
        let table = power_sums_newton(&p, 6).unwrap();
        for k in 1..=6 {
            let numeric: Complex64 = roots.iter().map(|r| r.inv().powu(k as u32)).sum();
            let exact = to_f64(table.get(k));
            let err = (numeric - exact).norm() / exact.abs().max(1.0);
            worst = worst.max(err);
            ensure(err < 1e-9, || {
                format!("numeric case {case}, k={k}: {numeric} vs {exact}")
            })?;
        }
    }
    Ok(format!(
        "100 Newton/Girard, 50 planted, 60 numeric (worst rel. err {worst:.1e})"
    ))
}

fn endpoints() -> Outcome {
    let budget = Budget::default();
    let mut type2_oracle = 0;
    for (name, graph) in panel() {
        let hc = models::build_hardcore(&graph, &frac(1, 2)).unwrap();
        let col = models::build_proper_coloring(&graph, 3).unwrap();
        let z_hc = exact::partition_exact_within(&hc, budget).unwrap();
        let p1 = poly::interpolation_polynomial(&hc, TypeI).unwrap();
        ensure(p1.evaluate(&int(1)) == z_hc && p1.evaluate(&int(0)).is_one(), || {
            format!("{name}: type1 endpoints")
        })?;
        for g in [&hc, &col] {
            let z = exact::partition_exact_within(g, budget).unwrap();
            let p2 = poly::interpolation_polynomial(g, TypeII).unwrap();
            ensure(
                p2.evaluate(&int(1)) == z && p2.evaluate(&int(0)) == g.normalization(),
                || format!("{name}: type2 endpoints"),
            )?;
            if graph.edge_count() <= 12 {
                type2_oracle += 1;
                ensure(poly::type2_polynomial_by_expansion(g, budget).unwrap() == p2, || {
                    format!("{name}: Lagrange vs edge-subset oracle")
                })?;
            }
        }
    }
    Ok(format!("8 panel graphs, {type2_oracle} Lagrange/oracle comparisons"))
}

fn theorem1_matrix() -> Outcome {
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for n in 2..=9 {
        graphs.push((format!("path({n})"), tg(TestGraph::Path(n))));
    }
    for n in 3..=8 {
        graphs.push((format!("cycle({n})"), tg(TestGraph::Cycle(n))));
    }
    graphs.push(("tree(3,2)".into(), tg(TestGraph::RegularTree { d: 3, depth: 2 })));
    let s = NodeSet::single(0);
    let opts = Theorem1Options {
        tau_budget: u128::MAX,
        ..Theorem1Options::default()
    };
    let (mut checks, mut taus) = (0u32, 0u128);
    for (name, graph) in &graphs {
        let models: Vec<(InterpolationKind, DecoratedGraph)> = vec![
            (TypeI, models::build_hardcore(graph, &int(1)).unwrap()),
            (TypeII, models::build_hardcore(graph, &int(1)).unwrap()),
            (TypeII, models::build_proper_coloring(graph, 3).unwrap()),
        ];
        for (kind, g) in &models {
            for m in 1..=3 {
                let r = pseudo::min_admissible_radius(*kind, m);
                let rep = pseudo::theorem1_check(g, &s, None, r, *kind, m, &opts).unwrap();
                ensure(rep.holds && !rep.sampled, || {
                    format!("{name} {} m={m} R={r}: witness {:?}", kind.as_str(), rep.witness)
                })?;
                checks += 1;
                taus += rep.tau_count;
            }
        }
    }
    let probe = models::build_hardcore(&tg(TestGraph::Path(5)), &int(1)).unwrap();
    let rep = pseudo::theorem1_check(&probe, &s, None, 1, TypeI, 3, &opts).unwrap();
    let w = rep.witness.ok_or("violation probe found no witness")?;
    Ok(format!(
        "{checks} checks, {taus} boundary conditions; probe witness k={} lhs={} rhs={}",
        w.k, w.lhs, w.rhs
    ))
}

fn beta_vanishing() -> Outcome {
    let lambda = frac(1, 2);
    let mut disconnected = 0;
    for k in 1..=subgraph::BETA_K_MAX {
        let table = subgraph::beta_table_type1(k, &lambda).unwrap();
        ensure(table.disconnected_nonzero().is_empty(), || {
            format!("k={k}: disconnected beta nonzero")
        })?;
        disconnected += table.disconnected_count();
        for (name, graph) in panel() {
            let hc = models::build_hardcore(&graph, &lambda).unwrap();
            let newton = power_sums_newton(&poly::type1_polynomial(&hc, &lambda).unwrap(), k).unwrap();
            let via_beta = table.evaluate(&graph).unwrap();
            ensure(&via_beta == newton.get(k), || {
                format!("{name} k={k}: {via_beta} vs {}", newton.get(k))
            })?;
        }
    }
    Ok(format!(
        "k <= 4 on 8 panel graphs; {disconnected} disconnected classes all zero"
    ))
}

fn accuracy() -> Outcome {
    let g = models::build_hardcore(&tg(TestGraph::Complete(4)), &frac(1, 2)).unwrap();
    let rows = pseudo::interpolation_accuracy(&g, TypeI, 12, Budget::default()).unwrap();
    let (e4, e12) = (rows[4].relative_error, rows[12].relative_error);
    let summary = format!("error at m=4 {e4:.3e}, at m=12 {e12:.3e}");
    ensure(e12 < 0.05 && e12 < e4, || summary.clone())?;
    Ok(summary)
}

fn ssm_decay() -> Outcome {
    let g = models::build_hardcore(&tg(TestGraph::Path(9)), &int(1)).unwrap();
    let s = NodeSet::single(4);
    let radii = [1, 2, 3, 4];
    let mut rho = Vec::new();
    let mut admissible = 0;
    for (kind, m) in [(TypeI, 1), (TypeI, 2), (TypeII, 1), (TypeII, 2)] {
        let rows = pseudo::ssm_scan(
            &[(int(1), g.clone())],
            &s,
            &radii,
            Some((kind, m)),
            &RhoOptions::default(),
        )
        .unwrap();
        for row in &rows {
            if row.radius_condition == Some(true) {
                admissible += 1;
                ensure(
                    row.pseudo_exact_zero == Some(true) && row.pseudo_gap == Some(0.0),
                    || format!("{} m={m} R={}: gap {:?}", kind.as_str(), row.r, row.pseudo_gap),
                )?;
            }
        }
        rho = rows.iter().map(|r| r.rho.clone()).collect();
    }
    ensure(rho[0] > rho[3], || {
        format!("rho_1 = {} not above rho_4 = {}", rho[0], rho[3])
    })?;
    Ok(format!(
        "rho_1 = {} > rho_4 = {}; {admissible} admissible rows with zero gap",
        rho[0], rho[3]
    ))
}

fn zf(args: &[&str], dir: &std::path::Path) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_zf"))
        .args(args)
        .current_dir(dir)
        .env_remove("ZF_BUDGET")
        .env("ZF_THREADS", "4")
        .output()
        .expect("zf runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn determinism() -> Outcome {
    let dir: PathBuf = std::env::temp_dir().join(format!("zf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let graph = r#"{"K":2,"nodes":[{"id":"a","a":["1","1/2"]},{"id":"b","a":["1","2/3"]},{"id":"c","a":["1","1"]}],
        "edges":[{"u":"a","v":"b","A":[["1","1"],["1","0"]]},{"u":"b","v":"c","A":[["1","1/3"],["1","0"]]}]}"#;
    std::fs::write(dir.join("g.json"), graph).unwrap();
    let hc7 = "--builder=path --model=hardcore --params=n=7,lambda=1";
    let commands: Vec<String> = vec![
        "exact --graph=g.json --S=a,b".into(),
        "exact --builder=complete --model=hardcore --params=n=3,lambda=1 --S=0 --R=1".into(),
        format!("exact {hc7} --S=0 --sigma=2 --T=3 --tau=1 --R=2"),
        "poly --graph=g.json --kind=type2".into(),
        "poly --builder=cycle --model=hardcore --params=n=4,lambda=1 --kind=type1 --format=csv".into(),
        format!("taylor {hc7} --kind=type1 --m=5 --z=1/2"),
        "taylor --builder=path --model=coloring --params=n=6,K=5 --kind=type2 --m=6 --accuracy".into(),
        format!("pseudo {hc7} --kind=type1 --m=3 --S=0 --sigma=2 --T=4 --tau=1"),
        format!("theorem1 {hc7} --kind=type1 --m=2 --S=0 --R=4"),
        "theorem1 --builder=grid --model=coloring --params=w=4,h=4,K=3 --kind=type2 --m=1 --S=0 --R=2 \
         --tau-budget=8 --samples=5 --seed=9"
            .into(),
        "ssm-scan --builder=path --model=hardcore --params=n=9 --sweep=lambda=1/2:3/2:1/2 --S=4 --R=1:4 \
         --kind=type2 --m=1"
            .into(),
        "ssm-scan --builder=grid --model=hardcore --params=w=4,h=4,lambda=1 --S=5 --R=2 --tau-budget=4 \
         --samples=3 --seed=3 --format=json"
            .into(),
        "subgraph --builder=grid --params=w=3,h=3 --pattern=path:n=2;edgeless:n=1 --decompose --size-max=3 \
         --beta-k=3 --lambda=1/2"
            .into(),
        "selftest --seed=5".into(),
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let out_file = format!("out{i}.txt");
        let mut args: Vec<&str> = cmd.split_whitespace().collect();
        let (first, first_code) = zf(&args, &dir);
        let (second, second_code) = zf(&args, &dir);
        ensure(first_code == 0 && second_code == 0, || {
            format!("{cmd}: exit {first_code}")
        })?;
        ensure(first == second && !first.is_empty(), || {
            format!("{cmd}: stdout differs between runs")
        })?;
        let flag = format!("--out={out_file}");
        args.push(&flag);
        zf(&args, &dir);
        let a = std::fs::read(dir.join(&out_file)).unwrap();
        zf(&args, &dir);
        let b = std::fs::read(dir.join(&out_file)).unwrap();
        ensure(a == b && a == first, || format!("{cmd}: --out file differs"))?;
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{} commands, stdout and --out byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "exact identities on random decorated graphs", exact_identities),
        (
            2,
            "Newton, Girard, planted roots and numeric roots agree",
            power_sum_agreement,
        ),
        (3, "interpolation polynomial endpoints and Lagrange oracle", endpoints),
        (
            4,
            "termwise Taylor-difference equality and violation probe",
            theorem1_matrix,
        ),
        (
            5,
            "beta table reproduces power sums; disconnected beta vanish",
            beta_vanishing,
        ),
        (6, "K4 hard-core lambda=1/2 accuracy below 5% at m=12", accuracy),
        (7, "SSM decay and zero pseudo-gap under the radius condition", ssm_decay),
        (8, "CLI determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = fmt_duration(start.elapsed());
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS  {title} [{detail}] ({elapsed})"),
            Err(reason) => {
                let known = KNOWN_UNATTAINABLE.contains(&id);
                let tag = if known { " (known unattainable)" } else { "" };
                println!("criterion {id}: FAIL{tag}  {title} [{reason}] ({elapsed})");
                if !known {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn fmt_duration(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}
