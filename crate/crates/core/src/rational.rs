//! Exact rational scalars.
//!
//! Every measure, radius and value of an approximation function is a
//! [`Rational`]. At the text boundary (CLI flags, JSON) rationals are written
//! `num/den`; the parser also accepts a bare integer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// `p^e` for any integer exponent.
pub fn pow(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// Parses `num/den` or an integer. Decimal notation is rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not an exact rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical machine rendering: always `num/den`, reduced, positive denominator.
pub fn to_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Floor of a rational as a big integer.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(floor(q))
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

/// Decimal approximation for human-facing output only.
pub fn approx(q: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = (q * Rational::from_integer(scale.clone())).round();
    let n = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let (ip, fp) = n.div_rem(&scale);
    if places == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = places)
    }
}

/// Serde adapter writing a rational as a `num/den` string.
pub mod serde_fraction {
    use super::{parse, to_fraction, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
