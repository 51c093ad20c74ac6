//! Exact rational scalars and their text encoding.
//!
//! Every weight, coefficient and power sum in the crate is a [`Q`]. The text
//! form is always `p/q`, including integers (`4/1`), so files and reports can
//! be compared byte for byte.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num / den`. Panics on a zero denominator, like `Ratio::new`.
pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(p))
        }
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back through logs when numerator or denominator overflow f64.
        let sign = if x.is_negative() { -1.0 } else { 1.0 };
        sign * ln_abs(x).exp()
    })
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|x|`; `-inf` for zero.
pub fn ln_abs(x: &Q) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn pow(x: &Q, e: usize) -> Q {
    num_traits::pow(x.clone(), e)
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}
