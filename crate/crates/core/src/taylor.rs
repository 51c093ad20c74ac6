//! Inverse-root power sums `r_k = sum_j zeta_j^{-k}` and the truncated
//! Taylor expansion of `log p(z)` at 0.
//!
//! With `p(z) = c_0 prod_j (1 - z/zeta_j)`, `log p(z) = log c_0 - sum_k r_k z^k / k`,
//! so the coefficients are `t_k = -r_k / k`. The constant `c_0` is carried
//! as a rational factor and never logged.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{disjoint_union, DecoratedGraph};
use crate::poly::{interpolation_polynomial, InterpolationKind, RationalPolynomial};
use crate::rational::{ln_abs, to_f64, Q};

/// `r_1..r_m`; `values[k - 1] = r_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumTable {
    pub m: usize,
    pub values: Vec<Q>,
}

impl PowerSumTable {
    pub fn get(&self, k: usize) -> &Q {
        &self.values[k - 1]
    }
}

fn normalized(p: &RationalPolynomial) -> Result<Vec<Q>> {
    let c0 = p.coeff(0);
    if c0.is_zero() {
        return Err(Error::VanishingConstantTerm);
    }
    Ok(p.coeffs().iter().map(|c| c / &c0).collect())
}

/// Newton's identity `k e_k = -sum_{i<k} e_i r_{k-i}` on `e = c / c_0`,
/// with `e_k = 0` past the degree.
pub fn power_sums_newton(p: &RationalPolynomial, m: usize) -> Result<PowerSumTable> {
    let e = normalized(p)?;
    let coef = |i: usize| e.get(i).cloned().unwrap_or_else(Q::zero);
    let mut r: Vec<Q> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut rk = -coef(k) * Q::from_integer(BigInt::from(k));
        for i in 1..k {
            rk -= coef(i) * &r[k - i - 1];
        }
        r.push(rk);
    }
    Ok(PowerSumTable { m, values: r })
}

/// Multiplicity vectors `(m_1, ..., m_k)` with `sum_i i m_i = k`.
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(part: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if part == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for mult in 0..=left / part {
            cur[part - 1] = mult;
            rec(part - 1, left - mult * part, cur, out);
        }
        cur[part - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    rec(k, k, &mut cur, &mut out);
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Girard's formula
/// `r_k = k sum_{m} (-1)^{|m|} (|m| - 1)! / prod m_i! * prod e_i^{m_i}`
/// over multiplicity vectors of `k`, on `e = c / c_0`.
pub fn power_sums_girard(p: &RationalPolynomial, m: usize) -> Result<PowerSumTable> {
    let e = normalized(p)?;
    let coef = |i: usize| e.get(i).cloned().unwrap_or_else(Q::zero);
    let mut values = Vec::with_capacity(m);
    for k in 1..=m {
        let mut rk = Q::zero();
        for mult in partitions(k) {
            let mut term = Q::one();
            for (i, &mi) in mult.iter().enumerate() {
                if mi > 0 {
                    term *= num_traits::pow(coef(i + 1), mi);
                }
            }
            if term.is_zero() {
                continue;
            }
            let total: usize = mult.iter().sum();
            let denom: BigInt = mult.iter().map(|&mi| factorial(mi)).product();
            let mut c = Q::new(factorial(total - 1), denom);
            if total % 2 == 1 {
                c = -c;
            }
            rk += c * term;
        }
        values.push(rk * Q::from_integer(BigInt::from(k)));
    }
    Ok(PowerSumTable { m, values })
}

/// `T_m(z) = log c_0 + sum_{k=1}^m t_k z^k`, with `c_0` kept as a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorApprox {
    pub m: usize,
    pub constant: Q,
    /// `coeffs[k - 1] = t_k`.
    pub coeffs: Vec<Q>,
}

impl TaylorApprox {
    pub fn t(&self, k: usize) -> &Q {
        &self.coeffs[k - 1]
    }

    /// `sum_{k>=1} t_k z^k`, exact.
    pub fn exponent(&self, z: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, t| (acc + t) * z)
    }

    /// `log(c_0 exp(sum t_k z^k))` in f64; needs `c_0 > 0`.
    pub fn ln_value(&self, z: &Q) -> f64 {
        ln_abs(&self.constant) + to_f64(&self.exponent(z))
    }

    /// `exp(T_m(z)) = c_0 exp(sum t_k z^k)` in f64.
    pub fn value(&self, z: &Q) -> f64 {
        let sign = if self.constant.is_negative() { -1.0 } else { 1.0 };
        sign * self.ln_value(z).exp()
    }
}

pub fn taylor_truncation(p: &RationalPolynomial, m: usize) -> Result<TaylorApprox> {
    let r = power_sums_newton(p, m)?;
    let coeffs = r
        .values
        .iter()
        .enumerate()
        .map(|(i, rk)| -rk / Q::from_integer(BigInt::from(i + 1)))
        .collect();
    Ok(TaylorApprox {
        m,
        constant: p.coeff(0),
        coeffs,
    })
}

/// Whether the power sums of `Z(g1 ⊔ g2)` are the sums of the parts'.
pub fn power_sums_additive_check(
    g1: &DecoratedGraph,
    g2: &DecoratedGraph,
    kind: InterpolationKind,
    m: usize,
) -> Result<bool> {
    let union = disjoint_union(g1, g2)?;
    let r1 = power_sums_newton(&interpolation_polynomial(g1, kind)?, m)?;
    let r2 = power_sums_newton(&interpolation_polynomial(g2, kind)?, m)?;
    let ru = power_sums_newton(&interpolation_polynomial(&union, kind)?, m)?;
    Ok((1..=m).all(|k| ru.get(k) == &(r1.get(k) + r2.get(k))))
}
