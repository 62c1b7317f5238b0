// SPDX-License-Identifier: Apache-2.0
//! Exact rational scalars and their canonical string form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficient field of every series in the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: `"p"` for integers and `"p/q"` otherwise, with `q > 0`
/// and the fraction reduced.
pub fn to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Decimal points and zero denominators are rejected.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// `x.to_i64()` for integral values that fit.
pub fn to_i64(x: &Q) -> Option<i64> {
    use num_traits::ToPrimitive;
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// n! as an exact rational.
pub fn factorial(n: u64) -> Q {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Q::from_integer(acc)
}

/// Generalised binomial coefficient `x (x-1) ... (x-j+1) / j!`, valid for
/// negative `x`.
pub fn binomial(x: i64, j: u64) -> Q {
    let mut num = BigInt::one();
    for i in 0..j as i64 {
        num *= x - i;
    }
    Q::from_integer(num) / factorial(j)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub(crate) fn serialize<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_string(x))
}

pub(crate) fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
    let s: String = serde::Deserialize::deserialize(d)?;
    parse(&s).map_err(serde::de::Error::custom)
}
