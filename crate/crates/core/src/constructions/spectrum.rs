//! Digit sequences `x_k` and the measure spectra of `C` and `B`.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::ds_sets::FamilyTag;
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Finitely many base-`p` digits `x_0, x_1, ...`, zero beyond the list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpectrumDigits {
    pub p: u64,
    pub digits: Vec<u32>,
}

impl SpectrumDigits {
    pub fn new(p: u64, digits: Vec<u32>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d as u64 >= p) {
            return Err(Error::InvalidDigits(format!("digit {d} is not below {p}")));
        }
        Ok(Self { p, digits })
    }

    /// Digits restricted to `{0, 1}`.
    pub fn binary(p: u64, digits: Vec<u32>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 1) {
            return Err(Error::InvalidDigits(format!("digit {d} is not binary")));
        }
        Self::new(p, digits)
    }

    /// Parses a digit string such as `"101"` (`x_0` first).
    pub fn parse(p: u64, s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '_'))
            .map(|c| c.to_digit(10).ok_or_else(|| Error::InvalidDigits(format!("{s:?}"))))
            .collect::<Result<_>>()?;
        Self::new(p, digits)
    }

    pub fn digit(&self, k: usize) -> u32 {
        self.digits.get(k).copied().unwrap_or(0)
    }

    pub fn is_binary(&self) -> bool {
        self.digits.iter().all(|&d| d <= 1)
    }

    /// `sum x_k p^{-k-1}`.
    pub fn value(&self) -> Rational {
        self.digits.iter().enumerate().map(|(k, &d)| int(d) * rational::pow(self.p, -(k as i64) - 1)).sum()
    }
}

/// Base-`p` digit `x_k = floor(p^{k+1} x) mod p` of `x ∈ [0, 1)`.
pub fn digit_of(p: u64, x: &Rational, k: u32) -> u32 {
    let scaled = x * rational::pow(p, k as i64 + 1);
    let d = rational::floor(&scaled) % num_bigint::BigInt::from(p);
    d.to_u32().expect("digit below p")
}

/// Measure `sum x_k (p-1) p^{-k-1}` attained by the binary-digit rule for `C`,
/// and its `B` counterpart (`1` when `x_0 = 1`).
pub fn spectrum_value(digits: &SpectrumDigits, family: FamilyTag) -> Result<Rational> {
    if !digits.is_binary() {
        return Err(Error::InvalidDigits("spectrum digits must be binary".into()));
    }
    let p = digits.p;
    let term = |k: usize| int(p - 1) * rational::pow(p, -(k as i64) - 1);
    let sum_from =
        |start: usize| -> Rational { (start..digits.digits.len()).filter(|&k| digits.digit(k) == 1).map(term).sum() };
    match family {
        FamilyTag::C => Ok(sum_from(0)),
        FamilyTag::B if digits.digit(0) == 1 => Ok(Rational::one()),
        FamilyTag::B => Ok(sum_from(1)),
        other => Err(Error::InvalidInput(format!("no spectrum for family {other}"))),
    }
}

/// Eventually periodic base-`p` expansion, `prefix` then `period` repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl Expansion {
    pub fn digits(&self) -> impl Iterator<Item = u32> + '_ {
        self.prefix.iter().chain(self.period.iter().cycle()).copied()
    }

    fn all_digits_at_most(&self, bound: u32) -> bool {
        self.prefix.iter().chain(&self.period).all(|&d| d <= bound)
    }
}

/// Greedy expansion of `y ∈ [0, 1)`; this never ends in a tail of `p - 1`.
pub fn greedy_expansion(p: u64, y: &Rational) -> Expansion {
    debug_assert!(*y >= Rational::zero() && *y < Rational::one());
    let pr = int(p);
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut s = y.clone();
    loop {
        if let Some(&start) = seen.get(&s) {
            let period = digits.split_off(start);
            return Expansion { prefix: digits, period };
        }
        seen.insert(s.clone(), digits.len());
        let t = &s * &pr;
        let d = rational::floor(&t);
        digits.push(d.to_u32().expect("digit below p"));
        s = t - Rational::from_integer(d);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Digits `x_k` with `x = sum x_k (p-1) p^{-k-1}`.
    pub digits: Expansion,
}

/// Whether `x` is attainable as `mu_p(C^p)` (family `C`) or `mu_p(B^p)`
/// (family `B`).
pub fn spectrum_membership(p: u64, x: &Rational, family: FamilyTag) -> Result<Membership> {
    if *x < Rational::zero() || *x > Rational::one() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    if !matches!(family, FamilyTag::C | FamilyTag::B) {
        return Err(Error::InvalidInput(format!("no spectrum for family {family}")));
    }
    let one = x.is_one();
    let digits =
        if one { Expansion { prefix: vec![], period: vec![1] } } else { greedy_expansion(p, &(x / int(p - 1))) };
    let binary = digits.all_digits_at_most(1);
    let member = match family {
        FamilyTag::C => binary,
        _ if one => true,
        // a trailing run of ones lets 1/2 start with x_0 = 0 as well
        _ if p == 2 => *x <= rational::ratio(1, 2),
        _ => binary && digits.digits().next() == Some(0),
    };
    Ok(Membership { member, digits })
}
