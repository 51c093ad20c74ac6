//! Pseudo-marginals `nu = exp(T_m(G_{S,sigma}, z)) / exp(T_m(G, z))`, the
//! exact boundary-independence check, truncation accuracy and the
//! correlation-decay scan.
//!
//! A pseudo-marginal is kept as `(c_0 ratio, exponent difference)`, both
//! exact; only [`PseudoMarginal::value`] touches floating point.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, boundary_conditions, Budget, RhoMode, RhoOptions};
use crate::graph::{ColorAssignment, DecoratedGraph, NodeSet};
use crate::par;
use crate::poly::{interpolation_polynomial, InterpolationKind};
use crate::rational::{ln_abs, to_f64, Q};
use crate::taylor::{taylor_truncation, TaylorApprox};

/// Mantissa bits of every numeric rendering (IEEE double).
pub const PRECISION_BITS: u32 = 53;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoMarginal {
    /// `c_0(numerator) / c_0(denominator)`.
    pub ratio: Q,
    /// `sum_k (t_k(numerator) - t_k(denominator)) z^k`.
    pub exponent: Q,
    pub z: Q,
    pub m: usize,
}

impl PseudoMarginal {
    /// `ratio * exp(exponent)`, computed through logs.
    pub fn value(&self) -> f64 {
        if self.ratio.is_zero() {
            return 0.0;
        }
        let sign = if self.ratio.is_negative() { -1.0 } else { 1.0 };
        sign * (ln_abs(&self.ratio) + to_f64(&self.exponent)).exp()
    }
}

pub fn taylor_of(g: &DecoratedGraph, kind: InterpolationKind, m: usize) -> Result<TaylorApprox> {
    taylor_truncation(&interpolation_polynomial(g, kind)?, m)
}

fn ratio_of(num: &TaylorApprox, den: &TaylorApprox, z: &Q) -> PseudoMarginal {
    PseudoMarginal {
        ratio: &num.constant / &den.constant,
        exponent: num.exponent(z) - den.exponent(z),
        z: z.clone(),
        m: num.m,
    }
}

/// `nu(G, S, sigma, z, m)`; the domain of `sigma` is `S`.
pub fn pseudo_marginal(
    g: &DecoratedGraph,
    sigma: &ColorAssignment,
    kind: InterpolationKind,
    z: &Q,
    m: usize,
) -> Result<PseudoMarginal> {
    let den = taylor_of(g, kind, m)?;
    let num = taylor_of(&g.reduce(sigma)?, kind, m)?;
    Ok(ratio_of(&num, &den, z))
}

/// `nu(G, S, sigma | T, tau) = exp(T_m(G_{S∪T, sigma∪tau})) / exp(T_m(G_{T,tau}))`.
pub fn conditional_pseudo_marginal(
    g: &DecoratedGraph,
    sigma: &ColorAssignment,
    tau: &ColorAssignment,
    kind: InterpolationKind,
    z: &Q,
    m: usize,
) -> Result<PseudoMarginal> {
    let both = sigma.merged(tau)?;
    let gt = g.reduce(tau)?;
    let den = taylor_of(&gt, kind, m)?;
    let num = taylor_of(&gt.reduce(&both)?, kind, m)?;
    Ok(ratio_of(&num, &den, z))
}

/// Smallest boundary distance at which the check is claimed for order `m`.
///
/// Type I: an occupied pin also removes its neighbours, so a pin at distance
/// `R` reaches `R - 1`; clusters of `m` nodes then need `R >= m + 2`.
/// Type II: `R >= 2m`, the radius under which the Type II argument is made
/// (`m + 1` already suffices on the tested graphs).
pub fn min_admissible_radius(kind: InterpolationKind, m: usize) -> usize {
    match kind {
        InterpolationKind::TypeI => {
            if m == 0 {
                1
            } else {
                m + 2
            }
        }
        InterpolationKind::TypeII => (2 * m).max(1),
    }
}

pub const THEOREM1_NOTE: &str = "The boundary-independence statement truncates the conditional side at R/2 while \
its argument needs no halving for Type I and replaces R by 2k for Type II. This check compares both sides \
at the same order m, termwise, and reports whether R meets the admissible radius (Type I: m+2, Type II: 2m).";

#[derive(Clone, Debug)]
pub struct Theorem1Options {
    /// Boundary conditions enumerated exhaustively up to this many.
    pub tau_budget: u128,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Theorem1Options {
            tau_budget: 1 << 14,
            samples: 512,
            seed: 0,
        }
    }
}

/// A failing comparison: `k = 0` stands for the constant ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub sigma: ColorAssignment,
    pub tau: ColorAssignment,
    pub k: usize,
    /// `t_k(G_{S∪T}) - t_k(G_T)`, or `c_0(G_{S∪T}) / c_0(G_T)` when `k = 0`.
    pub lhs: Q,
    /// `t_k(G_S) - t_k(G)`, or `c_0(G_S) / c_0(G)` when `k = 0`.
    pub rhs: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub holds: bool,
    /// Boundary empty: nothing to compare.
    pub vacuous: bool,
    pub sampled: bool,
    pub kind: InterpolationKind,
    pub m: usize,
    pub r: usize,
    pub boundary: NodeSet,
    /// Boundary conditions compared.
    pub tau_count: u128,
    /// Boundary conditions skipped because a constant term vanished.
    pub skipped: u128,
    pub required_radius: usize,
    pub radius_condition: bool,
    pub witness: Option<Witness>,
    pub note: &'static str,
}

/// Compares `t_k(G_{S∪T,sigma∪tau}) - t_k(G_{T,tau})` with
/// `t_k(G_{S,sigma}) - t_k(G)` for `k = 1..=m` and the matching ratio of
/// constants, for every boundary condition `tau` on `T = boundary(S, R)`
/// (or a seeded sample). With `sigma = None` every coloring of `S` is
/// tried. The first failure in enumeration order is the witness.
pub fn theorem1_check(
    g: &DecoratedGraph,
    s: &NodeSet,
    sigma: Option<&ColorAssignment>,
    r: usize,
    kind: InterpolationKind,
    m: usize,
    opts: &Theorem1Options,
) -> Result<Theorem1Report> {
    if r == 0 {
        return Err(Error::InvalidModel("R must be at least 1".into()));
    }
    if let Some(&u) = s.iter().find(|&&u| u >= g.n()) {
        return Err(Error::NodeOutOfRange { node: u, n: g.n() });
    }
    let sigmas: Vec<ColorAssignment> = match sigma {
        Some(a) => {
            if a.domain() != *s {
                return Err(Error::InvalidModel("sigma must assign exactly the nodes of S".into()));
            }
            a.validate(g.n(), g.k())?;
            vec![a.clone()]
        }
        None => ColorAssignment::all_on(s, g.k()).collect(),
    };
    let t = g.boundary(s, r);
    let required_radius = min_admissible_radius(kind, m);
    let mut report = Theorem1Report {
        holds: true,
        vacuous: t.is_empty(),
        sampled: false,
        kind,
        m,
        r,
        boundary: t.clone(),
        tau_count: 0,
        skipped: 0,
        required_radius,
        radius_condition: r >= required_radius,
        witness: None,
        note: THEOREM1_NOTE,
    };
    if t.is_empty() {
        return Ok(report);
    }
    let base = taylor_of(g, kind, m)?;
    let unconditional: Vec<Option<TaylorApprox>> = sigmas
        .iter()
        .map(|sg| nonvanishing(taylor_of(&g.reduce(sg)?, kind, m)))
        .collect::<Result<_>>()?;

    let (taus, mode) = boundary_conditions(&t, g.k(), opts.tau_budget, opts.samples, opts.seed);
    report.sampled = mode == RhoMode::Sampled;
    let outcomes = par::map(taus, |tau| -> Result<TauOutcome> {
        let gt = g.reduce(&tau)?;
        let Some(cond_base) = nonvanishing(taylor_of(&gt, kind, m))? else {
            return Ok(TauOutcome::Skipped);
        };
        let mut compared = false;
        for (sg, uncond) in sigmas.iter().zip(&unconditional) {
            let cond = nonvanishing(taylor_of(&gt.reduce(sg)?, kind, m))?;
            let (Some(cond), Some(uncond)) = (cond, uncond) else {
                continue;
            };
            compared = true;
            if let Some(w) = first_difference(&cond, &cond_base, uncond, &base, sg, &tau) {
                return Ok(TauOutcome::Failed(w));
            }
        }
        Ok(if compared {
            TauOutcome::Equal
        } else {
            TauOutcome::Skipped
        })
    });
    for outcome in outcomes {
        match outcome? {
            TauOutcome::Skipped => report.skipped += 1,
            TauOutcome::Equal => report.tau_count += 1,
            TauOutcome::Failed(w) => {
                report.tau_count += 1;
                if report.witness.is_none() {
                    report.holds = false;
                    report.witness = Some(w);
                }
            }
        }
    }
    Ok(report)
}

enum TauOutcome {
    Skipped,
    Equal,
    Failed(Witness),
}

/// `None` for a vanishing constant term.
fn nonvanishing(t: Result<TaylorApprox>) -> Result<Option<TaylorApprox>> {
    match t {
        Ok(t) => Ok(Some(t)),
        Err(Error::VanishingConstantTerm) => Ok(None),
        Err(e) => Err(e),
    }
}

fn first_difference(
    cond: &TaylorApprox,
    cond_base: &TaylorApprox,
    uncond: &TaylorApprox,
    base: &TaylorApprox,
    sigma: &ColorAssignment,
    tau: &ColorAssignment,
) -> Option<Witness> {
    let lhs0 = &cond.constant / &cond_base.constant;
    let rhs0 = &uncond.constant / &base.constant;
    let witness = |k, lhs, rhs| Witness {
        sigma: sigma.clone(),
        tau: tau.clone(),
        k,
        lhs,
        rhs,
    };
    if lhs0 != rhs0 {
        return Some(witness(0, lhs0, rhs0));
    }
    for k in 1..=cond.m {
        let lhs = cond.t(k) - cond_base.t(k);
        let rhs = uncond.t(k) - base.t(k);
        if lhs != rhs {
            return Some(witness(k, lhs, rhs));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyRow {
    pub m: usize,
    /// `exp(T_m(1))` in f64.
    pub estimate: f64,
    pub z_exact: Q,
    pub relative_error: f64,
}

/// `|exp(T_m(1)) / Z - 1|` for `m = 0..=m_max`, via `expm1` of the log gap.
pub fn interpolation_accuracy(
    g: &DecoratedGraph,
    kind: InterpolationKind,
    m_max: usize,
    budget: Budget,
) -> Result<Vec<AccuracyRow>> {
    let z = exact::partition_exact_within(g, budget)?;
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    let p = interpolation_polynomial(g, kind)?;
    let ln_z = ln_abs(&z);
    let one = Q::from_integer(1.into());
    (0..=m_max)
        .map(|m| {
            let t = taylor_truncation(&p, m)?;
            let ln_est = t.ln_value(&one);
            Ok(AccuracyRow {
                m,
                estimate: t.value(&one),
                z_exact: z.clone(),
                relative_error: (ln_est - ln_z).exp_m1().abs(),
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub param: Q,
    pub r: usize,
    pub boundary_size: usize,
    pub rho: Q,
    pub rho_mode: RhoMode,
    /// `max_{sigma,tau} |nu(S,sigma | dB,tau) - nu(S,sigma)|` in f64.
    pub pseudo_gap: Option<f64>,
    /// Whether every compared pseudo-marginal pair was exactly equal.
    pub pseudo_exact_zero: Option<bool>,
    pub radius_condition: Option<bool>,
}

/// `rho_R` for each model instance and radius, optionally with the
/// pseudo-marginal gap at `z = 1` for a given scheme and order.
pub fn ssm_scan(
    models: &[(Q, DecoratedGraph)],
    s: &NodeSet,
    radii: &[usize],
    pseudo: Option<(InterpolationKind, usize)>,
    opts: &RhoOptions,
) -> Result<Vec<ScanRow>> {
    let one = Q::from_integer(1.into());
    let mut rows = Vec::new();
    for (param, g) in models {
        for &r in radii {
            let rho = exact::rho_r(g, s, r, opts)?;
            let mut row = ScanRow {
                param: param.clone(),
                r,
                boundary_size: rho.boundary.len(),
                rho: rho.value,
                rho_mode: rho.mode,
                pseudo_gap: None,
                pseudo_exact_zero: None,
                radius_condition: None,
            };
            if let Some((kind, m)) = pseudo {
                let (taus, _) = boundary_conditions(&rho.boundary, g.k(), opts.tau_budget, opts.samples, opts.seed);
                let mut gap = 0.0f64;
                let mut exact_zero = true;
                for sigma in ColorAssignment::all_on(s, g.k()) {
                    let Some(uncond) = nonvanishing_nu(pseudo_marginal(g, &sigma, kind, &one, m))? else {
                        continue;
                    };
                    for tau in &taus {
                        let Some(cond) = nonvanishing_nu(conditional_pseudo_marginal(g, &sigma, tau, kind, &one, m))?
                        else {
                            continue;
                        };
                        if cond.ratio != uncond.ratio || cond.exponent != uncond.exponent {
                            exact_zero = false;
                            gap = gap.max((cond.value() - uncond.value()).abs());
                        }
                    }
                }
                row.pseudo_gap = Some(gap);
                row.pseudo_exact_zero = Some(exact_zero);
                row.radius_condition = Some(r >= min_admissible_radius(kind, m));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn nonvanishing_nu(nu: Result<PseudoMarginal>) -> Result<Option<PseudoMarginal>> {
    match nu {
        Ok(nu) => Ok(Some(nu)),
        Err(Error::VanishingConstantTerm) => Ok(None),
        Err(e) => Err(e),
    }
}
