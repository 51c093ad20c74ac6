//! Interpolation polynomials `Z(G(z))`.
//!
//! Type I (hard-core only) scales the fugacity of free nodes by `z`; pinned
//! nodes keep their weight, so a reduced graph has
//! `Z(G_{S,sigma}(z)) = lambda^{#occupied pins} * I(G~, lambda z)` where `G~`
//! drops pinned nodes and neighbours of occupied pins. Type II moves every
//! edge matrix along `J + (A - J) z`, giving `Z(G(0)) = L(G)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::elimination::partition_by_elimination;
use crate::error::{Error, Result};
use crate::exact::{for_each_weighted, Budget};
use crate::graph::{DecoratedGraph, Graph, Matrix};
use crate::models::{self, OCCUPIED};
use crate::par;
use crate::rational::{format_q, int, pow, Q};

/// Dense coefficients `c_0 + c_1 z + ...`, trailing zeros trimmed but `c_0`
/// always present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<Q>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Q::zero());
        }
        RationalPolynomial { coeffs }
    }

    pub fn constant(c: Q) -> Self {
        RationalPolynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// `c_k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    /// Highest nonzero index; 0 for constants, including the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * z + c)
    }

    pub fn mul(&self, other: &RationalPolynomial) -> RationalPolynomial {
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }

    pub fn add(&self, other: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Q) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_q).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InterpolationKind {
    TypeI,
    TypeII,
}

impl InterpolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InterpolationKind::TypeI => "type1",
            InterpolationKind::TypeII => "type2",
        }
    }
}

impl fmt::Display for InterpolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InterpolationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "type1" | "i" | "typei" => Ok(InterpolationKind::TypeI),
            "type2" | "ii" | "typeii" => Ok(InterpolationKind::TypeII),
            _ => Err(Error::Parse(format!("unknown interpolation kind {s:?}"))),
        }
    }
}

/// `Z(G(z))` for the given scheme; Type I infers `lambda` from `g`.
pub fn interpolation_polynomial(g: &DecoratedGraph, kind: InterpolationKind) -> Result<RationalPolynomial> {
    match kind {
        InterpolationKind::TypeI => {
            let lambda = models::hardcore_fugacity(g)?;
            type1_polynomial(g, &lambda)
        }
        InterpolationKind::TypeII => Ok(type2_polynomial(g)),
    }
}

/// `c_k = lambda^{#occupied pins} * i_k(G~) * lambda^k`. For an unpinned
/// graph this is the independence polynomial with `c_0 = 1`.
pub fn type1_polynomial(g: &DecoratedGraph, lambda: &Q) -> Result<RationalPolynomial> {
    let expected = models::build_hardcore(g.graph(), lambda)?.reduce(g.pins())?;
    if &expected != g {
        return Err(Error::NotHardcore(format!(
            "decoration is not hard-core with lambda = {lambda}"
        )));
    }
    let Some(res) = models::hardcore_residual(g.graph(), g.pins()) else {
        return Ok(RationalPolynomial::constant(Q::zero()));
    };
    let counts = independence_counts(&g.graph().induced(&res.free))?;
    let base = pow(lambda, res.occupied);
    let coeffs = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| Q::from_integer(BigInt::from(c)) * &base * pow(lambda, k))
        .collect();
    Ok(RationalPolynomial::new(coeffs))
}

/// Oracle for [`type1_polynomial`]: every coloring with nonzero weight
/// contributes its weight at `z^{#occupied free nodes}`.
pub fn type1_polynomial_by_enumeration(g: &DecoratedGraph, budget: Budget) -> Result<RationalPolynomial> {
    models::hardcore_fugacity(g)?;
    let pins = g.pins();
    let mut coeffs = vec![Q::zero(); g.n() + 1];
    for_each_weighted(g, budget, |phi, w| {
        let free_occupied = phi
            .iter()
            .enumerate()
            .filter(|&(u, &c)| c == OCCUPIED && pins.get(u).is_none())
            .count();
        coeffs[free_occupied] += w;
    })?;
    Ok(RationalPolynomial::new(coeffs))
}

fn shifted_matrix(m: &Matrix, z: &Q) -> Matrix {
    Matrix::from_fn(m.k(), |i, j| Q::one() + (m.get(i, j) - Q::one()) * z)
}

/// `Z(G(z))` with `A(z) = J + (A - J) z`, recovered by exact Lagrange
/// interpolation through `z = 0, 1, ..., |E|`, each point by variable
/// elimination.
pub fn type2_polynomial(g: &DecoratedGraph) -> RationalPolynomial {
    let points: Vec<Q> = (0..=g.graph().edge_count() as i64).map(int).collect();
    let values = par::map(points.clone(), |z| {
        partition_by_elimination(&g.map_edge_matrices(|_, m| shifted_matrix(m, &z)))
    });
    let pairs: Vec<(Q, Q)> = points.into_iter().zip(values).collect();
    lagrange_interpolate(&pairs)
}

/// Oracle for [`type2_polynomial`]: expands `prod_(u,v) (1 + z (A - 1)_{phi(u),phi(v)})`
/// per coloring, which groups the sum over edge subsets `E'` of
/// `prod a * prod_{E'} (A - 1)` by the coloring.
pub fn type2_polynomial_by_expansion(g: &DecoratedGraph, budget: Budget) -> Result<RationalPolynomial> {
    let free = g.map_edge_matrices(|_, m| Matrix::from_fn(m.k(), |_, _| Q::one()));
    let edges: Vec<(usize, usize)> = g.graph().edges();
    let mut coeffs = vec![Q::zero(); edges.len() + 1];
    for_each_weighted(&free, budget, |phi, w| {
        // w is prod a here since every matrix entry is 1.
        let mut local = vec![Q::zero(); edges.len() + 1];
        local[0] = w.clone();
        let mut deg = 0;
        for &(u, v) in &edges {
            let d = g.entry(u, v, phi[u], phi[v]) - Q::one();
            if d.is_zero() {
                continue;
            }
            deg += 1;
            for i in (1..=deg).rev() {
                let carry = &local[i - 1] * &d;
                local[i] += carry;
            }
        }
        for (c, l) in coeffs.iter_mut().zip(local) {
            *c += l;
        }
    })?;
    Ok(RationalPolynomial::new(coeffs))
}

/// The unique polynomial of degree `< points.len()` through `points`
/// (distinct abscissae).
pub fn lagrange_interpolate(points: &[(Q, Q)]) -> RationalPolynomial {
    let mut acc = RationalPolynomial::constant(Q::zero());
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = RationalPolynomial::constant(Q::one());
        let mut denom = Q::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                basis = basis.mul(&RationalPolynomial::new(vec![-xj.clone(), Q::one()]));
                denom *= xi - xj;
            }
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}

/// Largest graph the memoized counter accepts (bitmask width).
const MASK_BITS: usize = 128;

/// `[i_0, ..., i_n]`: independent sets by size, by branching on a
/// max-degree vertex and splitting into connected components.
pub fn independence_counts(graph: &Graph) -> Result<Vec<u128>> {
    let n = graph.n();
    if n > MASK_BITS {
        return Err(Error::budget(format!("{n} nodes"), MASK_BITS as u128));
    }
    let nbr: Vec<u128> = (0..n)
        .map(|u| graph.neighbors(u).iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut memo = HashMap::new();
    Ok(count_mask(all, &nbr, &mut memo))
}

fn component_of(mask: u128, nbr: &[u128]) -> u128 {
    let start = mask.trailing_zeros() as usize;
    let mut comp = 1u128 << start;
    let mut frontier = comp;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = nbr[u] & mask & !comp;
        comp |= new;
        frontier |= new;
    }
    comp
}

fn mul_counts(a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn count_mask(mask: u128, nbr: &[u128], memo: &mut HashMap<u128, Vec<u128>>) -> Vec<u128> {
    if mask == 0 {
        return vec![1];
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let comp = component_of(mask, nbr);
    let result = if comp != mask {
        let a = count_mask(comp, nbr, memo);
        let b = count_mask(mask & !comp, nbr, memo);
        mul_counts(&a, &b)
    } else {
        let mut best = mask.trailing_zeros() as usize;
        let mut best_deg = 0;
        let mut rest = mask;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (nbr[u] & mask).count_ones();
            if d > best_deg {
                best = u;
                best_deg = d;
            }
        }
        let bit = 1u128 << best;
        let without = count_mask(mask & !bit, nbr, memo);
        let with = count_mask(mask & !bit & !nbr[best], nbr, memo);
        let mut out = vec![0u128; without.len().max(with.len() + 1)];
        for (i, &x) in without.iter().enumerate() {
            out[i] += x;
        }
        for (i, &x) in with.iter().enumerate() {
            out[i + 1] += x;
        }
        out
    };
    memo.insert(mask, result.clone());
    result
}

/// `i_0..=i_{k_max}` by the fast counter.
pub fn i_k_counts(graph: &Graph, k_max: usize) -> Result<Vec<u128>> {
    let mut c = independence_counts(graph)?;
    c.resize(k_max + 1, 0);
    Ok(c)
}

/// `i_0..=i_{k_max}` by filtering all `2^n` node subsets.
pub fn i_k_counts_by_subsets(graph: &Graph, k_max: usize, budget: Budget) -> Result<Vec<u128>> {
    let n = graph.n();
    budget.check(2, n)?;
    let nbr: Vec<u128> = (0..n)
        .map(|u| graph.neighbors(u).iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    let mut counts = vec![0u128; k_max + 1];
    for set in 0u128..(1u128 << n) {
        let independent = (0..n).all(|u| set >> u & 1 == 0 || nbr[u] & set == 0);
        let size = set.count_ones() as usize;
        if independent && size <= k_max {
            counts[size] += 1;
        }
    }
    Ok(counts)
}
