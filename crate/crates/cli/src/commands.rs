use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use zf_core::exact::{self, Budget, RhoMode, RhoOptions};
use zf_core::io::LabeledGraph;
use zf_core::models;
use zf_core::poly::{self, InterpolationKind};
use zf_core::pseudo::{self, Theorem1Options, PRECISION_BITS};
use zf_core::rational::{format_q, parse_q, to_f64, Q};
use zf_core::subgraph::{self, PatternGraph};
use zf_core::taylor;
use zf_core::{ColorAssignment, NodeSet};

use crate::config::{self, GraphSource};
use crate::{CliError, CommonArgs, Format, GraphArgs, OutputArgs, SubgraphArgs};

/// A command's result before formatting.
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub default: Format,
    /// Set when the command's own assertion failed (exit code 1).
    pub failure: Option<String>,
}

impl Report {
    fn json(json: Value) -> Self {
        Report {
            json,
            csv: None,
            default: Format::Json,
            failure: None,
        }
    }
}

pub fn finish(report: Report, out: &OutputArgs) -> Result<(String, Option<String>, Option<String>), CliError> {
    let text = match out.format.unwrap_or(report.default) {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("serializable") + "\n",
        Format::Csv => report
            .csv
            .ok_or_else(|| CliError::config("this command has no CSV output; use --format json"))?,
    };
    Ok((text, out.out.clone(), report.failure))
}

fn source(g: &GraphArgs, overrides: &[(String, String)]) -> Result<GraphSource, CliError> {
    let mut params = config::parse_params(g.params.as_deref())?;
    for (k, v) in overrides {
        params.insert(k.clone(), v.clone());
    }
    Ok(GraphSource {
        file: g.graph.clone(),
        builder: g.builder.clone(),
        model: g.model.clone(),
        params,
    })
}

fn budget(o: &OutputArgs) -> Budget {
    o.budget.filter(|&b| b > 0).map(Budget).unwrap_or_else(Budget::from_env)
}

fn kind(a: &CommonArgs) -> Result<InterpolationKind, CliError> {
    let k = a
        .kind
        .as_deref()
        .ok_or_else(|| CliError::config("--kind type1|type2 is required"))?;
    Ok(k.parse()?)
}

fn need_m(a: &CommonArgs) -> Result<usize, CliError> {
    a.m.ok_or_else(|| CliError::config("--m is required"))
}

fn z_value(a: &CommonArgs) -> Result<Q, CliError> {
    Ok(match &a.z {
        Some(z) => parse_q(z)?,
        None => Q::from_integer(1.into()),
    })
}

fn single_radius(a: &CommonArgs) -> Result<Option<usize>, CliError> {
    a.r.as_deref()
        .map(|r| {
            r.trim()
                .parse()
                .map_err(|_| CliError::config(format!("--R {r:?} is not an integer")))
        })
        .transpose()
}

fn q(x: &Q) -> Value {
    Value::String(format_q(x))
}

fn ids(lg: &LabeledGraph, s: &NodeSet) -> Value {
    Value::Array(s.iter().map(|&u| Value::String(lg.ids[u].clone())).collect())
}

fn colors(lg: &LabeledGraph, a: &ColorAssignment) -> Value {
    let map: BTreeMap<String, usize> = a.iter().map(|(u, c)| (lg.ids[u].clone(), c + 1)).collect();
    json!(map)
}

fn numeric(x: f64) -> Value {
    json!({ "value": x, "precision_bits": PRECISION_BITS })
}

fn seed_for(o: &OutputArgs, may_sample: bool) -> Result<u64, CliError> {
    match (o.seed, may_sample) {
        (Some(s), _) => Ok(s),
        (None, false) => Ok(0),
        (None, true) => Err(CliError::config(
            "boundary too large to enumerate: --seed is required for sampled mode",
        )),
    }
}

fn csv_cell(v: &str) -> String {
    if v.contains(',') || v.contains('"') {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",") + "\n";
    for row in rows {
        out += &row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}

pub fn exact(a: &CommonArgs) -> Result<Report, CliError> {
    let lg = source(&a.graph, &[])?.load()?;
    let g = &lg.graph;
    let b = budget(&a.output);
    let z = exact::partition_exact_within(g, b)?;
    let mut out = Map::new();
    out.insert("n".into(), json!(g.n()));
    out.insert("K".into(), json!(g.k()));
    out.insert("Z".into(), q(&z));
    out.insert("L".into(), q(&g.normalization()));
    let s = config::node_set(&lg, a.s.as_deref())?;
    if a.sigma.is_some() {
        let sigma = config::assignment(&lg, a.s.as_deref(), a.sigma.as_deref())?;
        let direct = exact::marginal_within(g, &sigma, b)?;
        let ratio = exact::marginal_by_ratio(g, &sigma, b)?;
        out.insert("marginal".into(), q(&direct));
        out.insert("marginal_by_ratio".into(), q(&ratio));
        out.insert("ratio_identity_holds".into(), json!(direct == ratio));
        if a.t.is_some() || a.tau.is_some() {
            let tau = config::assignment(&lg, a.t.as_deref(), a.tau.as_deref())?;
            let c = exact::conditional_marginal(g, &sigma, &tau, b)?;
            out.insert("conditional_marginal".into(), q(&c));
        }
    } else if !s.is_empty() {
        let table = exact::marginal_table(g, &s, b)?;
        let probs: BTreeMap<String, Value> = table
            .probs
            .iter()
            .map(|(cs, p)| {
                (
                    cs.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(","),
                    q(p),
                )
            })
            .collect();
        out.insert("S".into(), ids(&lg, &s));
        out.insert("marginals".into(), json!(probs));
    }
    if let Some(r) = single_radius(a)? {
        if s.is_empty() {
            return Err(CliError::config("--R needs --S"));
        }
        let boundary = g.boundary(&s, r);
        let tau_budget = a.tau_budget.unwrap_or(1 << 12);
        let may_sample = ColorAssignment::count_on(&boundary, g.k()) > tau_budget;
        let opts = RhoOptions {
            budget: b,
            tau_budget,
            samples: a.samples.unwrap_or(256),
            seed: seed_for(&a.output, may_sample)?,
        };
        let rho = exact::rho_r(g, &s, r, &opts)?;
        out.insert(
            "rho".into(),
            json!({
                "R": r,
                "value": q(&rho.value),
                "numeric": numeric(to_f64(&rho.value)),
                "mode": mode_name(rho.mode),
                "boundary": ids(&lg, &rho.boundary),
                "tau_tried": rho.tau_tried.to_string(),
                "tau_feasible": rho.tau_feasible.to_string(),
                "argmax_sigma": rho.argmax.as_ref().map(|s| colors(&lg, s)),
                "seed": opts.seed,
            }),
        );
    }
    Ok(Report::json(Value::Object(out)))
}

fn mode_name(m: RhoMode) -> &'static str {
    match m {
        RhoMode::Exhaustive => "exhaustive",
        RhoMode::Sampled => "sampled_lower_bound",
    }
}

pub fn poly(a: &CommonArgs) -> Result<Report, CliError> {
    let lg = source(&a.graph, &[])?.load()?;
    let g = &lg.graph;
    let kind = kind(a)?;
    let p = poly::interpolation_polynomial(g, kind)?;
    let mut out = json!({
        "kind": kind.as_str(),
        "coefficients": p.coeffs().iter().map(format_q).collect::<Vec<_>>(),
        "degree": p.degree(),
        "value_at_0": q(&p.evaluate(&Q::from_integer(0.into()))),
        "value_at_1": q(&p.evaluate(&Q::from_integer(1.into()))),
    });
    if kind == InterpolationKind::TypeI {
        let counts = poly::i_k_counts(g.graph(), g.n())?;
        out["i_k"] = json!(counts.iter().map(u128::to_string).collect::<Vec<_>>());
        out["lambda"] = q(&models::hardcore_fugacity(g)?);
    }
    let rows: Vec<Vec<String>> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| vec![k.to_string(), format_q(c)])
        .collect();
    Ok(Report {
        csv: Some(csv(&["k", "c_k"], &rows)),
        ..Report::json(out)
    })
}

pub fn taylor(a: &CommonArgs) -> Result<Report, CliError> {
    let lg = source(&a.graph, &[])?.load()?;
    let g = &lg.graph;
    let kind = kind(a)?;
    let m = need_m(a)?;
    if a.accuracy {
        let rows = pseudo::interpolation_accuracy(g, kind, m, budget(&a.output))?;
        let csv_rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.m.to_string(),
                    format!("{:e}", r.estimate),
                    format_q(&r.z_exact),
                    format!("{:e}", r.relative_error),
                ]
            })
            .collect();
        let json_rows: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "m": r.m,
                    "estimate": r.estimate,
                    "Z": q(&r.z_exact),
                    "relative_error": r.relative_error,
                })
            })
            .collect();
        return Ok(Report {
            json: json!({ "kind": kind.as_str(), "precision_bits": PRECISION_BITS, "rows": json_rows }),
            csv: Some(csv(&["m", "exp_T_m_1", "Z", "relative_error"], &csv_rows)),
            default: Format::Csv,
            failure: None,
        });
    }
    let p = poly::interpolation_polynomial(g, kind)?;
    let newton = taylor::power_sums_newton(&p, m)?;
    let girard = taylor::power_sums_girard(&p, m)?;
    let t = taylor::taylor_truncation(&p, m)?;
    let z = z_value(a)?;
    let out = json!({
        "kind": kind.as_str(),
        "m": m,
        "c0": q(&t.constant),
        "power_sums": newton.values.iter().map(format_q).collect::<Vec<_>>(),
        "girard_agrees": newton == girard,
        "t": t.coeffs.iter().map(format_q).collect::<Vec<_>>(),
        "z": q(&z),
        "exponent": q(&t.exponent(&z)),
        "exp_T_m": numeric(t.value(&z)),
    });
    let rows: Vec<Vec<String>> = (1..=m)
        .map(|k| vec![k.to_string(), format_q(newton.get(k)), format_q(t.t(k))])
        .collect();
    Ok(Report {
        csv: Some(csv(&["k", "r_k", "t_k"], &rows)),
        ..Report::json(out)
    })
}

pub fn pseudo(a: &CommonArgs) -> Result<Report, CliError> {
    let lg = source(&a.graph, &[])?.load()?;
    let g = &lg.graph;
    let kind = kind(a)?;
    let m = need_m(a)?;
    let z = z_value(a)?;
    let sigma = config::assignment(&lg, a.s.as_deref(), a.sigma.as_deref())?;
    let tau = config::assignment(&lg, a.t.as_deref(), a.tau.as_deref())?;
    let nu = pseudo::conditional_pseudo_marginal(g, &sigma, &tau, kind, &z, m)?;
    let b = budget(&a.output);
    let mu = match exact::conditional_marginal(g, &sigma, &tau, b) {
        Ok(mu) => q(&mu),
        Err(e) if e.is_budget() => Value::Null,
        Err(e) => Value::String(e.to_string()),
    };
    Ok(Report::json(json!({
        "kind": kind.as_str(),
        "m": m,
        "z": q(&z),
        "sigma": colors(&lg, &sigma),
        "tau": colors(&lg, &tau),
        "ratio": q(&nu.ratio),
        "exponent": q(&nu.exponent),
        "nu": numeric(nu.value()),
        "mu": mu,
    })))
}

pub fn theorem1(a: &CommonArgs) -> Result<Report, CliError> {
    let lg = source(&a.graph, &[])?.load()?;
    let g = &lg.graph;
    let kind = kind(a)?;
    let m = need_m(a)?;
    let r = single_radius(a)?.ok_or_else(|| CliError::config("--R is required"))?;
    let s = config::node_set(&lg, a.s.as_deref())?;
    if s.is_empty() {
        return Err(CliError::config("--S is required"));
    }
    let sigma = match a.sigma {
        Some(_) => Some(config::assignment(&lg, a.s.as_deref(), a.sigma.as_deref())?),
        None => None,
    };
    let tau_budget = a.tau_budget.unwrap_or(1 << 14);
    let may_sample = ColorAssignment::count_on(&g.boundary(&s, r), g.k()) > tau_budget;
    let opts = Theorem1Options {
        tau_budget,
        samples: a.samples.unwrap_or(512),
        seed: seed_for(&a.output, may_sample)?,
    };
    let rep = pseudo::theorem1_check(g, &s, sigma.as_ref(), r, kind, m, &opts)?;
    let witness = rep.witness.as_ref().map(|w| {
        json!({
            "sigma": colors(&lg, &w.sigma),
            "tau": colors(&lg, &w.tau),
            "k": w.k,
            "lhs": q(&w.lhs),
            "rhs": q(&w.rhs),
        })
    });
    let failure = (!rep.holds && rep.radius_condition)
        .then(|| format!("coefficient differences disagree at admissible radius R={r}"));
    Ok(Report {
        failure,
        ..Report::json(json!({
            "holds": rep.holds,
            "vacuous": rep.vacuous,
            "sampled": rep.sampled,
            "kind": rep.kind.as_str(),
            "m": rep.m,
            "R": rep.r,
            "S": ids(&lg, &s),
            "boundary": ids(&lg, &rep.boundary),
            "tau_count": rep.tau_count.to_string(),
            "skipped": rep.skipped.to_string(),
            "required_radius": rep.required_radius,
            "radius_condition": rep.radius_condition,
            "witness": witness,
            "seed": opts.seed,
            "note": rep.note,
        }))
    })
}

pub fn ssm_scan(a: &CommonArgs) -> Result<Report, CliError> {
    let radii = config::radii(a.r.as_deref().ok_or_else(|| CliError::config("--R is required"))?)?;
    if radii.contains(&0) {
        return Err(CliError::config("radii must be at least 1"));
    }
    let (param, values) = match &a.sweep {
        Some(spec) => {
            let (name, vals) = config::sweep_values(spec)?;
            (name, vals.into_iter().map(Some).collect())
        }
        None => ("-".to_string(), vec![None]),
    };
    let mut instances = Vec::new();
    let mut labeled = None;
    for v in values {
        let overrides: Vec<(String, String)> = v.iter().map(|x| (param.clone(), format_q(x))).collect();
        let lg = source(&a.graph, &overrides)?.load()?;
        instances.push((v.unwrap_or_else(|| Q::from_integer(0.into())), lg.graph.clone()));
        labeled.get_or_insert(lg);
    }
    let lg = labeled.expect("at least one instance");
    let s = config::node_set(&lg, a.s.as_deref())?;
    if s.is_empty() {
        return Err(CliError::config("--S is required"));
    }
    let pseudo_spec = match (&a.kind, a.m) {
        (Some(_), Some(m)) => Some((kind(a)?, m)),
        (None, None) => None,
        _ => return Err(CliError::config("--kind and --m go together")),
    };
    let tau_budget = a.tau_budget.unwrap_or(1 << 12);
    let k = lg.graph.k();
    let may_sample = radii
        .iter()
        .any(|&r| ColorAssignment::count_on(&lg.graph.boundary(&s, r), k) > tau_budget);
    let opts = RhoOptions {
        budget: budget(&a.output),
        tau_budget,
        samples: a.samples.unwrap_or(256),
        seed: seed_for(&a.output, may_sample)?,
    };
    let rows = pseudo::ssm_scan(&instances, &s, &radii, pseudo_spec, &opts)?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                if param == "-" {
                    String::new()
                } else {
                    format_q(&r.param)
                },
                r.r.to_string(),
                r.boundary_size.to_string(),
                format_q(&r.rho),
                format!("{:e}", to_f64(&r.rho)),
                mode_name(r.rho_mode).to_string(),
                opt(r.pseudo_gap.map(|g| format!("{g:e}"))),
                opt(r.pseudo_exact_zero.map(|b| b.to_string())),
                opt(r.radius_condition.map(|b| b.to_string())),
            ]
        })
        .collect();
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "param": if param == "-" { Value::Null } else { q(&r.param) },
                "R": r.r,
                "boundary_size": r.boundary_size,
                "rho": q(&r.rho),
                "rho_f64": to_f64(&r.rho),
                "rho_mode": mode_name(r.rho_mode),
                "pseudo_gap": r.pseudo_gap,
                "pseudo_exact_zero": r.pseudo_exact_zero,
                "radius_condition": r.radius_condition,
            })
        })
        .collect();
    Ok(Report {
        json: json!({
            "param": param,
            "S": ids(&lg, &s),
            "seed": opts.seed,
            "precision_bits": PRECISION_BITS,
            "rows": json_rows,
        }),
        csv: Some(csv(
            &[
                "param",
                "R",
                "boundary_size",
                "rho",
                "rho_f64",
                "rho_mode",
                "pseudo_gap",
                "pseudo_exact_zero",
                "radius_condition",
            ],
            &csv_rows,
        )),
        default: Format::Csv,
        failure: None,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn pattern_json(p: &PatternGraph) -> Value {
    let g = p.to_graph();
    json!({
        "canonical": hex(&p.canonical_form()),
        "nodes": p.n(),
        "edges": g.edges(),
        "connected": p.is_connected(),
    })
}

pub fn subgraph(a: &SubgraphArgs) -> Result<Report, CliError> {
    let params = config::parse_params(a.graph.params.as_deref())?;
    let host = match (&a.graph.graph, &a.graph.builder) {
        (Some(_), None) => source(&a.graph, &[])?.load()?.graph.graph().clone(),
        (None, Some(b)) => config::test_graph(b, &params)?,
        _ => return Err(CliError::config("give exactly one of --graph or --builder")),
    };
    let mut out = Map::new();
    out.insert("n".into(), json!(host.n()));
    out.insert("edges".into(), json!(host.edge_count()));
    let patterns: Vec<(String, PatternGraph)> = match &a.pattern {
        Some(list) => list
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|spec| Ok((spec.to_string(), config::pattern(spec)?)))
            .collect::<Result<_, CliError>>()?,
        None => Vec::new(),
    };
    let mut rows = Vec::new();
    if !patterns.is_empty() {
        let mut counts = Vec::new();
        for (spec, p) in &patterns {
            let c = subgraph::ind_count(p, &host)?;
            rows.push(vec![spec.clone(), hex(&p.canonical_form()), c.to_string()]);
            let mut entry = pattern_json(p);
            entry["pattern"] = json!(spec);
            entry["ind"] = json!(c.to_string());
            counts.push(entry);
        }
        out.insert("patterns".into(), Value::Array(counts));
    }
    if a.decompose {
        let list: Vec<PatternGraph> = patterns.iter().map(|(_, p)| p.clone()).collect();
        if list.is_empty() {
            return Err(CliError::config("--decompose needs --pattern"));
        }
        let d = subgraph::ind_product_decompose(&list, &host)?;
        let terms: Vec<Value> = d
            .alphas
            .values()
            .map(|(f, alpha)| {
                let mut e = pattern_json(f);
                e["alpha"] = json!(alpha.to_string());
                e
            })
            .collect();
        out.insert(
            "decomposition".into(),
            json!({ "lhs": d.lhs.to_string(), "rhs": d.rhs.to_string(), "holds": d.holds(), "terms": terms }),
        );
    }
    if let Some(size_max) = a.size_max {
        let subsets = subgraph::connected_induced_subgraphs(&host, size_max, Budget::from_env())?;
        let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
        for s in &subsets {
            *by_size.entry(s.len()).or_default() += 1;
        }
        out.insert(
            "connected".into(),
            json!({ "size_max": size_max, "count": subsets.len(), "by_size": by_size }),
        );
    }
    if let Some(k) = a.beta_k {
        let lambda = parse_q(
            a.lambda
                .as_deref()
                .ok_or_else(|| CliError::config("--beta-k needs --lambda"))?,
        )?;
        let table = subgraph::beta_table_type1(k, &lambda)?;
        let entries: Vec<Value> = table
            .entries
            .values()
            .map(|(h, beta)| {
                let mut e = pattern_json(h);
                e["beta"] = q(beta);
                e
            })
            .collect();
        let hc = models::build_hardcore(&host, &lambda)?;
        let newton = taylor::power_sums_newton(&poly::type1_polynomial(&hc, &lambda)?, k)?;
        let via_beta = table.evaluate(&host)?;
        let consistent = table.disconnected_nonzero().is_empty() && &via_beta == newton.get(k);
        out.insert(
            "beta".into(),
            json!({
                "k": k,
                "lambda": q(&lambda),
                "entries": entries,
                "disconnected_all_zero": table.disconnected_nonzero().is_empty(),
                "roots_via_beta": q(&via_beta),
                "roots_via_newton": q(newton.get(k)),
            }),
        );
        if !consistent {
            return Ok(Report {
                failure: Some("beta expansion disagrees with Newton power sums".into()),
                ..Report::json(Value::Object(out))
            });
        }
    }
    Ok(Report {
        csv: (!rows.is_empty()).then(|| csv(&["pattern", "canonical", "ind"], &rows)),
        ..Report::json(Value::Object(out))
    })
}
