//! Brute-force oracle: partition functions, marginals and the correlation
//! functional `rho_R` by full enumeration of colorings.
//!
//! Colorings are visited as a mixed-radix counter over nodes `0..n`, node 0
//! most significant. Partial products are carried down the recursion and
//! zero prefixes are pruned, which never changes a sum.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ColorAssignment, DecoratedGraph, NodeSet};
use crate::par;
use crate::rational::Q;

pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Upper bound on the number of configurations a single enumeration may
/// visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// `ZF_BUDGET` if set and positive, otherwise the default.
    pub fn from_env() -> Self {
        std::env::var("ZF_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .filter(|&b| b > 0)
            .map(Budget)
            .unwrap_or_default()
    }

    pub fn check(&self, k: usize, n: usize) -> Result<()> {
        match (k as u128).checked_pow(n as u32) {
            Some(c) if c <= self.0 => Ok(()),
            Some(c) => Err(Error::budget(c, self.0)),
            None => Err(Error::budget(format!("{k}^{n}"), self.0)),
        }
    }
}

/// Edge lookups oriented from each node back to its lower-indexed
/// neighbours, so a node's factor depends only on the prefix.
struct Plan<'g> {
    g: &'g DecoratedGraph,
    back: Vec<Vec<usize>>,
}

impl<'g> Plan<'g> {
    fn new(g: &'g DecoratedGraph) -> Self {
        let back = (0..g.n())
            .map(|u| g.graph().neighbors(u).range(..u).copied().collect())
            .collect();
        Plan { g, back }
    }

    /// `a^u_c * prod_{v<u} A^(v,u)_{phi(v), c}`.
    fn factor(&self, colors: &[usize], u: usize, c: usize) -> Q {
        let mut f = self.g.node_weight(u)[c].clone();
        for &v in &self.back[u] {
            if f.is_zero() {
                break;
            }
            f *= self.g.entry(v, u, colors[v], c);
        }
        f
    }

    /// Visits every coloring agreeing with `fixed` whose weight is nonzero.
    fn walk(&self, fixed: &ColorAssignment, visit: &mut dyn FnMut(&[usize], &Q)) {
        let mut colors = vec![0; self.g.n()];
        self.walk_from(0, &Q::one(), fixed, &mut colors, visit);
    }

    fn walk_from(
        &self,
        u: usize,
        prefix: &Q,
        fixed: &ColorAssignment,
        colors: &mut [usize],
        visit: &mut dyn FnMut(&[usize], &Q),
    ) {
        if u == colors.len() {
            visit(colors, prefix);
            return;
        }
        let range = match fixed.get(u) {
            Some(c) => c..c + 1,
            None => 0..self.g.k(),
        };
        for c in range {
            let f = self.factor(colors, u, c);
            if f.is_zero() {
                continue;
            }
            colors[u] = c;
            self.walk_from(u + 1, &(prefix * f), fixed, colors, visit);
        }
    }
}

/// Calls `visit(phi, w(phi))` for every coloring with nonzero weight, in
/// mixed-radix order.
pub fn for_each_weighted(g: &DecoratedGraph, budget: Budget, mut visit: impl FnMut(&[usize], &Q)) -> Result<()> {
    budget.check(g.k(), g.n())?;
    Plan::new(g).walk(&ColorAssignment::new(), &mut visit);
    Ok(())
}

/// `w(phi)`; zero for colorings forbidden by the decoration.
pub fn weight(g: &DecoratedGraph, phi: &[usize]) -> Result<Q> {
    if phi.len() != g.n() {
        return Err(Error::InvalidGraph(format!(
            "coloring of length {} for {} nodes",
            phi.len(),
            g.n()
        )));
    }
    if let Some(&c) = phi.iter().find(|&&c| c >= g.k()) {
        return Err(Error::ColorOutOfRange { color: c, k: g.k() });
    }
    let plan = Plan::new(g);
    let mut w = Q::one();
    for u in 0..g.n() {
        w *= plan.factor(phi, u, phi[u]);
        if w.is_zero() {
            break;
        }
    }
    Ok(w)
}

/// Sum of `w(phi)` over colorings agreeing with `fixed`.
fn restricted_sum(g: &DecoratedGraph, fixed: &ColorAssignment, budget: Budget) -> Result<Q> {
    fixed.validate(g.n(), g.k())?;
    budget.check(g.k(), g.n() - fixed.len())?;
    let plan = Plan::new(g);
    // Split the top of the tree across workers; each branch is independent.
    let split: Vec<usize> = (0..g.n()).filter(|&u| fixed.get(u).is_none()).take(2).collect();
    let branches: Vec<ColorAssignment> = ColorAssignment::all_on(&NodeSet::from_sorted(split), g.k())
        .map(|a| fixed.merged(&a).expect("disjoint domains"))
        .collect();
    let parts = par::map(branches, |branch| {
        let mut z = Q::zero();
        plan.walk(&branch, &mut |_, w| z += w);
        z
    });
    Ok(parts.into_iter().fold(Q::zero(), |s, x| s + x))
}

/// `Z(G) = sum_phi prod_u a^u_phi(u) prod_(u,v) A^(u,v)_phi(u),phi(v)`.
pub fn partition_exact(g: &DecoratedGraph) -> Result<Q> {
    partition_exact_within(g, Budget::from_env())
}

pub fn partition_exact_within(g: &DecoratedGraph, budget: Budget) -> Result<Q> {
    restricted_sum(g, &ColorAssignment::new(), budget)
}

/// `mu(G, S, sigma)` by direct conditioning: the weight of colorings that
/// agree with `sigma`, over `Z(G)`.
pub fn marginal(g: &DecoratedGraph, sigma: &ColorAssignment) -> Result<Q> {
    marginal_within(g, sigma, Budget::from_env())
}

pub fn marginal_within(g: &DecoratedGraph, sigma: &ColorAssignment, budget: Budget) -> Result<Q> {
    sigma.validate(g.n(), g.k())?;
    let z = partition_exact_within(g, budget)?;
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    Ok(restricted_sum(g, sigma, budget)? / z)
}

/// `mu(G, S, sigma)` as `Z(G_{S,sigma}) / Z(G)`.
pub fn marginal_by_ratio(g: &DecoratedGraph, sigma: &ColorAssignment, budget: Budget) -> Result<Q> {
    let z = partition_exact_within(g, budget)?;
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    Ok(partition_exact_within(&g.reduce(sigma)?, budget)? / z)
}

/// The law of `phi|_S` under the Gibbs measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalTable {
    pub s: NodeSet,
    /// Keyed by the colors of `s` in node order; colorings of probability
    /// zero are present with value zero.
    pub probs: BTreeMap<Vec<usize>, Q>,
}

impl MarginalTable {
    pub fn get(&self, sigma: &ColorAssignment) -> Option<&Q> {
        (sigma.domain() == self.s)
            .then(|| self.probs.get(&sigma.colors()))
            .flatten()
    }

    pub fn total(&self) -> Q {
        self.probs.values().fold(Q::zero(), |s, x| s + x)
    }
}

/// One pass over all colorings, bucketed by their restriction to `s`.
pub fn marginal_table(g: &DecoratedGraph, s: &NodeSet, budget: Budget) -> Result<MarginalTable> {
    budget.check(g.k(), g.n())?;
    if let Some(&u) = s.iter().find(|&&u| u >= g.n()) {
        return Err(Error::NodeOutOfRange { node: u, n: g.n() });
    }
    let mut probs: BTreeMap<Vec<usize>, Q> = ColorAssignment::all_on(s, g.k())
        .map(|a| (a.colors(), Q::zero()))
        .collect();
    let mut z = Q::zero();
    let mut key = vec![0; s.len()];
    for_each_weighted(g, budget, |phi, w| {
        for (slot, &u) in key.iter_mut().zip(s.iter()) {
            *slot = phi[u];
        }
        *probs.get_mut(&key).expect("every key present") += w;
        z += w;
    })?;
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    for p in probs.values_mut() {
        *p /= &z;
    }
    Ok(MarginalTable { s: s.clone(), probs })
}

/// `mu(G, S, sigma | T, tau) = Z(G_{S∪T, sigma∪tau}) / Z(G_{T, tau})`.
pub fn conditional_marginal(
    g: &DecoratedGraph,
    sigma: &ColorAssignment,
    tau: &ColorAssignment,
    budget: Budget,
) -> Result<Q> {
    let both = sigma.merged(tau)?;
    let den = partition_exact_within(&g.reduce(tau)?, budget)?;
    if den.is_zero() {
        return Err(Error::ZeroProbabilityCondition);
    }
    Ok(partition_exact_within(&g.reduce(&both)?, budget)? / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoMode {
    Exhaustive,
    /// Seeded sample of boundary conditions; the value is a lower bound.
    Sampled,
}

#[derive(Clone, Debug)]
pub struct RhoOptions {
    pub budget: Budget,
    /// Largest number of boundary conditions enumerated exhaustively.
    pub tau_budget: u128,
    /// Boundary conditions drawn in sampled mode.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RhoOptions {
    fn default() -> Self {
        RhoOptions {
            budget: Budget::from_env(),
            tau_budget: 1 << 12,
            samples: 256,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoResult {
    pub value: Q,
    pub mode: RhoMode,
    pub boundary: NodeSet,
    pub tau_tried: u128,
    pub tau_feasible: u128,
    /// The `sigma` attaining the maximum, if the boundary is nonempty.
    pub argmax: Option<ColorAssignment>,
}

/// Boundary conditions to try: all of them, or a seeded sample of distinct
/// indices when there are more than `tau_budget`.
pub(crate) fn boundary_conditions(
    t: &NodeSet,
    k: usize,
    tau_budget: u128,
    samples: usize,
    seed: u64,
) -> (Vec<ColorAssignment>, RhoMode) {
    let total = ColorAssignment::count_on(t, k);
    if total <= tau_budget {
        return (ColorAssignment::all_on(t, k).collect(), RhoMode::Exhaustive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = BTreeSet::new();
    let want = (samples as u128).min(total) as usize;
    while picked.len() < want {
        picked.insert(rng.gen_range(0..total));
    }
    let taus = picked.into_iter().map(|i| ColorAssignment::nth_on(t, k, i)).collect();
    (taus, RhoMode::Sampled)
}

/// `rho_R(G, S) = max_sigma max_{tau1,tau2} |mu(S,sigma|dB,tau1) - mu(S,sigma|dB,tau2)|`
/// over feasible boundary conditions on `dB = boundary(S, R)`, computed as
/// `max - min` per `sigma`.
pub fn rho_r(g: &DecoratedGraph, s: &NodeSet, r: usize, opts: &RhoOptions) -> Result<RhoResult> {
    if r == 0 {
        return Err(Error::InvalidModel("R must be at least 1".into()));
    }
    if let Some(&u) = s.iter().find(|&&u| u >= g.n()) {
        return Err(Error::NodeOutOfRange { node: u, n: g.n() });
    }
    if partition_exact_within(g, opts.budget)?.is_zero() {
        return Err(Error::ZeroPartition);
    }
    let t = g.boundary(s, r);
    if t.is_empty() {
        return Ok(RhoResult {
            value: Q::zero(),
            mode: RhoMode::Exhaustive,
            boundary: t,
            tau_tried: 0,
            tau_feasible: 0,
            argmax: None,
        });
    }
    let (taus, mode) = boundary_conditions(&t, g.k(), opts.tau_budget, opts.samples, opts.seed);
    let tried = taus.len() as u128;
    let tables = par::map(taus, |tau| -> Result<Option<MarginalTable>> {
        match marginal_table(&g.reduce(&tau)?, s, opts.budget) {
            Ok(table) => Ok(Some(table)),
            Err(Error::ZeroPartition) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut extremes: BTreeMap<Vec<usize>, (Q, Q)> = BTreeMap::new();
    let mut feasible = 0u128;
    for table in tables {
        let Some(table) = table? else { continue };
        feasible += 1;
        for (sigma, p) in table.probs {
            extremes
                .entry(sigma)
                .and_modify(|(lo, hi)| {
                    if p < *lo {
                        *lo = p.clone();
                    }
                    if p > *hi {
                        *hi = p.clone();
                    }
                })
                .or_insert_with(|| (p.clone(), p));
        }
    }
    if feasible == 0 {
        return Err(Error::AllBoundaryInfeasible);
    }
    let (best, value) = extremes
        .into_iter()
        .map(|(sigma, (lo, hi))| (sigma, hi - lo))
        .fold(None::<(Vec<usize>, Q)>, |acc, (sigma, d)| match acc {
            Some((_, ref best)) if *best >= d => acc,
            _ => Some((sigma, d)),
        })
        .expect("at least one sigma");
    Ok(RhoResult {
        value,
        mode,
        boundary: t,
        tau_tried: tried,
        tau_feasible: feasible,
        argmax: Some(ColorAssignment::on(s, &best)),
    })
}
