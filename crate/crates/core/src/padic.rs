//! Rationals viewed as p-adic numbers to finite precision, and closed balls
//! of `Q_p` clipped to `Z_p`.
//!
//! A ball that meets `Z_p` in positive measure is always a residue class
//! `c + p^M Z_p` with `0 <= c < p^M`. Radius 0 gives the singleton of the
//! centre. Every conversion from a radius to a depth is an exact rational
//! comparison.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `nu_p(q)`, with the zero rational mapped to `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `true` iff the valuation is at least `bound`.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

fn bigint_valuation(p: u64, n: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational.
pub fn valuation(p: u64, q: &Rational) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(bigint_valuation(p, q.numer()) - bigint_valuation(p, q.denom()))
}

pub fn p_power(p: u64, m: u32) -> BigUint {
    BigUint::from(p).pow(m)
}

/// The inverse of `a` modulo `p^precision`, reduced into `[0, p^precision)`.
pub fn mod_inverse_prime_power(a: &BigInt, p: u64, precision: u32) -> Result<BigUint> {
    if precision == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    let modulus = BigInt::from(p_power(p, precision));
    let not_invertible = || Error::NotInvertible { a: a.to_string(), p, precision };
    let reduced = a.mod_floor(&modulus);
    let eg = reduced.extended_gcd(&modulus);
    if !eg.gcd.is_one() {
        return Err(not_invertible());
    }
    eg.x.mod_floor(&modulus).to_biguint().ok_or_else(not_invertible)
}

/// `q mod p^precision` for a rational with denominator prime to `p`.
pub fn residue(p: u64, q: &Rational, precision: u32) -> Result<BigUint> {
    if precision == 0 {
        return Ok(BigUint::zero());
    }
    if q.denom().mod_floor(&BigInt::from(p)).is_zero() {
        return Err(Error::NotPAdicInteger { p, value: q.to_string() });
    }
    let modulus = BigInt::from(p_power(p, precision));
    let inv = BigInt::from(mod_inverse_prime_power(q.denom(), p, precision)?);
    let r = (q.numer() * inv).mod_floor(&modulus);
    Ok(r.to_biguint().expect("reduced residue is nonnegative"))
}

/// Base-`p` digits of `r` (least significant first), padded to `len`.
pub fn digits_of(p: u64, r: &BigUint, len: u32) -> Vec<u32> {
    let pb = BigUint::from(p);
    let mut r = r.clone();
    (0..len)
        .map(|_| {
            let (q, d) = r.div_rem(&pb);
            r = q;
            d.to_u32().expect("digit below p")
        })
        .collect()
}

/// Finite base-`p` expansion `d_0 + d_1 p + ... + d_{M-1} p^{M-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitVector {
    pub p: u64,
    pub digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(p: u64, digits: Vec<u32>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d as u64 >= p) {
            return Err(Error::InvalidDigits(format!("digit {d} is not below {p}")));
        }
        Ok(Self { p, digits })
    }

    pub fn precision(&self) -> u32 {
        self.digits.len() as u32
    }

    /// `sum d_m p^m`.
    pub fn value(&self) -> BigUint {
        let pb = BigUint::from(self.p);
        self.digits.iter().rev().fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d))
    }
}

/// Digits of `q` modulo `p^precision`; negative rationals map to their
/// nonnegative residue.
pub fn digit_expand(p: u64, q: &Rational, precision: u32) -> Result<DigitVector> {
    let r = residue(p, q, precision)?;
    Ok(DigitVector { p, digits: digits_of(p, &r, precision) })
}

/// Smallest integer `M` with `p^-M <= radius`, for `radius > 0`.
pub fn depth_for_radius(p: u64, radius: &Rational) -> i64 {
    debug_assert!(radius.is_positive());
    let pb = BigInt::from(p);
    let (num, den) = (radius.numer(), radius.denom());
    if num >= den {
        // radius >= 1: M = -j for the largest j with p^j <= radius.
        let mut j = 0i64;
        let mut pj = pb.clone();
        while &pj * den <= *num {
            pj *= &pb;
            j += 1;
        }
        -j
    } else {
        // radius < 1: smallest M >= 1 with p^M * radius >= 1.
        let mut m = 1i64;
        let mut pm = pb.clone();
        while &pm * num < *den {
            pm *= &pb;
            m += 1;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BallKind {
    Empty,
    Singleton(Rational),
    /// `residue + p^depth Z_p`
    Class {
        residue: BigUint,
        depth: u32,
    },
}

/// A closed ball of `Q_p` intersected with `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicBall {
    pub p: u64,
    pub kind: BallKind,
}

impl PAdicBall {
    pub fn empty(p: u64) -> Self {
        Self { p, kind: BallKind::Empty }
    }

    pub fn zp(p: u64) -> Self {
        Self::class_unchecked(p, BigUint::zero(), 0)
    }

    /// `residue + p^depth Z_p`, reducing the residue.
    pub fn class(p: u64, residue: impl Into<BigInt>, depth: u32) -> Self {
        let modulus = BigInt::from(p_power(p, depth));
        let r = residue.into().mod_floor(&modulus);
        Self::class_unchecked(p, r.to_biguint().expect("nonnegative"), depth)
    }

    fn class_unchecked(p: u64, residue: BigUint, depth: u32) -> Self {
        Self { p, kind: BallKind::Class { residue, depth } }
    }

    pub fn measure(&self) -> Rational {
        match &self.kind {
            BallKind::Class { depth, .. } => rational::pow(self.p, -(*depth as i64)),
            _ => Rational::zero(),
        }
    }

    pub fn as_class(&self) -> Option<(&BigUint, u32)> {
        match &self.kind {
            BallKind::Class { residue, depth } => Some((residue, *depth)),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match &self.kind {
            BallKind::Empty => false,
            BallKind::Singleton(c) => c == x,
            BallKind::Class { residue: c, depth } => residue(self.p, x, *depth).is_ok_and(|r| &r == c),
        }
    }
}

impl fmt::Display for PAdicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BallKind::Empty => write!(f, "empty"),
            BallKind::Singleton(c) => write!(f, "{{{c}}}"),
            BallKind::Class { residue, depth } => write!(f, "{residue} + {}^{depth} Z_{}", self.p, self.p),
        }
    }
}

/// The closed ball `B(center, radius)` of `Q_p` intersected with `Z_p`.
pub fn ball_intersect_zp(p: u64, center: &Rational, radius: &Rational) -> Result<PAdicBall> {
    if radius.is_negative() {
        return Err(Error::InvalidRadius(radius.to_string()));
    }
    let v = valuation(p, center);
    if radius.is_zero() {
        return Ok(if v.at_least(0) {
            PAdicBall { p, kind: BallKind::Singleton(center.clone()) }
        } else {
            PAdicBall::empty(p)
        });
    }
    let m = depth_for_radius(p, radius);
    if m <= 0 {
        return Ok(if v.at_least(m) { PAdicBall::zp(p) } else { PAdicBall::empty(p) });
    }
    if !v.at_least(0) {
        return Ok(PAdicBall::empty(p));
    }
    let depth = m as u32;
    Ok(PAdicBall::class_unchecked(p, residue(p, center, depth)?, depth))
}

/// A real half-open interval `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfOpenInterval {
    pub start: Rational,
    pub end: Rational,
}

impl HalfOpenInterval {
    pub fn length(&self) -> Rational {
        &self.end - &self.start
    }
}

/// Preimage of a class under `iota_p`, which reads base-`p` digits of a
/// nonnegative real as a p-adic expansion: digit `b_m` of the residue lands
/// at `p^-m`, and the class becomes an interval of length `p^{1-M}`.
pub fn iota_inverse_ball(ball: &PAdicBall) -> Result<HalfOpenInterval> {
    let (c, depth) = ball.as_class().ok_or(Error::DegenerateBall)?;
    let p = ball.p;
    let start: Rational = digits_of(p, c, depth)
        .iter()
        .enumerate()
        .map(|(m, &b)| Rational::from_integer(b.into()) * rational::pow(p, -(m as i64)))
        .sum();
    let end = &start + rational::pow(p, 1 - depth as i64);
    Ok(HalfOpenInterval { start, end })
}

/// Image of a unit ball `c + p^M Z_p` under `x -> 1/x`.
pub fn invert_unit_ball(ball: &PAdicBall) -> Result<PAdicBall> {
    let (c, depth) = ball.as_class().ok_or(Error::NotAUnitBall)?;
    let c = BigInt::from_biguint(Sign::Plus, c.clone());
    if depth == 0 || c.mod_floor(&BigInt::from(ball.p)).is_zero() {
        return Err(Error::NotAUnitBall);
    }
    let inv = mod_inverse_prime_power(&c, ball.p, depth)?;
    Ok(PAdicBall::class_unchecked(ball.p, inv, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn class(p: u64, c: u64, m: u32) -> PAdicBall {
        PAdicBall::class(p, c, m)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, &int(8)), Valuation::Finite(3));
        assert_eq!(valuation(3, &ratio(10, 9)), Valuation::Finite(-2));
        assert_eq!(valuation(5, &int(7)), Valuation::Finite(0));
        assert_eq!(valuation(5, &int(0)), Valuation::Infinite);
        assert_eq!(valuation(3, &ratio(-18, 5)), Valuation::Finite(2));
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit_expand(3, &int(5), 2).unwrap().digits, vec![2, 1]);
        // oracle: the unique b in [0, 9) with 2b = 1 mod 9
        let inv2 = (0..9u32).find(|b| 2 * b % 9 == 1).unwrap();
        assert_eq!(inv2, 5);
        assert_eq!(digit_expand(3, &ratio(1, 2), 2).unwrap().digits, vec![2, 1]);
        assert_eq!(digit_expand(2, &int(-1), 3).unwrap().digits, vec![1, 1, 1]);
        assert!(matches!(digit_expand(3, &ratio(1, 3), 2), Err(Error::NotPAdicInteger { .. })));
    }

    #[test]
    fn inverse_examples() {
        let brute = |a: u64, m: u64| (0..m).find(|b| a * b % m == 1).unwrap();
        assert_eq!(brute(2, 9), 5);
        assert_eq!(mod_inverse_prime_power(&2.into(), 3, 2).unwrap(), 5u32.into());
        assert_eq!(mod_inverse_prime_power(&1.into(), 5, 3).unwrap(), 1u32.into());
        assert_eq!(mod_inverse_prime_power(&3.into(), 5, 1).unwrap(), 2u32.into());
        assert_eq!(mod_inverse_prime_power(&(-2).into(), 3, 2).unwrap(), 4u32.into());
        assert!(matches!(mod_inverse_prime_power(&6.into(), 3, 2), Err(Error::NotInvertible { .. })));
        for m in [4u64, 8, 27, 125, 49] {
            let p = crate::number_theory::factorize(m).unwrap().pairs()[0].0;
            let e = crate::number_theory::valuation_u64(p, m);
            for a in 1..m {
                if a % p != 0 {
                    let got = mod_inverse_prime_power(&a.into(), p, e).unwrap();
                    assert_eq!(got, brute(a, m).into());
                }
            }
        }
    }

    #[test]
    fn depth_conversion_is_closed() {
        assert_eq!(depth_for_radius(3, &ratio(1, 3)), 1);
        assert_eq!(depth_for_radius(3, &ratio(1, 4)), 2);
        assert_eq!(depth_for_radius(2, &ratio(1, 48)), 6);
        assert_eq!(depth_for_radius(2, &int(1)), 0);
        assert_eq!(depth_for_radius(2, &ratio(17, 15)), 0);
        assert_eq!(depth_for_radius(2, &int(2)), -1);
        assert_eq!(depth_for_radius(5, &ratio(17, 6)), 0);
        assert_eq!(depth_for_radius(3, &int(27)), -3);
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ball_intersect_zp(3, &int(5), &ratio(1, 3)).unwrap(), class(3, 2, 1));
        assert_eq!(ball_intersect_zp(3, &ratio(1, 3), &ratio(1, 9)).unwrap(), PAdicBall::empty(3));
        assert_eq!(ball_intersect_zp(2, &ratio(7, 3), &int(1)).unwrap(), PAdicBall::zp(2));
        // radius >= 1 reaches a centre of negative valuation only when large enough
        assert_eq!(ball_intersect_zp(3, &ratio(1, 3), &int(1)).unwrap(), PAdicBall::empty(3));
        assert_eq!(ball_intersect_zp(3, &ratio(1, 3), &int(3)).unwrap(), PAdicBall::zp(3));
        assert_eq!(ball_intersect_zp(3, &ratio(1, 2), &int(0)).unwrap().kind, BallKind::Singleton(ratio(1, 2)));
        assert_eq!(ball_intersect_zp(3, &ratio(1, 3), &int(0)).unwrap(), PAdicBall::empty(3));
        assert!(matches!(ball_intersect_zp(3, &int(1), &int(-1)), Err(Error::InvalidRadius(_))));
        assert_eq!(ball_intersect_zp(5, &int(0), &ratio(1, 25)).unwrap(), class(5, 0, 2));
    }

    #[test]
    fn iota_examples() {
        let i = iota_inverse_ball(&PAdicBall::zp(3)).unwrap();
        assert_eq!((i.start, i.end), (int(0), int(3)));
        let i = iota_inverse_ball(&class(2, 1, 1)).unwrap();
        assert_eq!((i.start, i.end), (int(1), int(2)));
        let i = iota_inverse_ball(&class(5, 7, 2)).unwrap();
        assert_eq!((i.start, i.end), (ratio(11, 5), ratio(12, 5)));
        assert_eq!(iota_inverse_ball(&PAdicBall::empty(5)), Err(Error::DegenerateBall));
    }

    #[test]
    fn unit_inversion_examples() {
        assert_eq!(invert_unit_ball(&class(3, 2, 1)).unwrap(), class(3, 2, 1));
        assert_eq!(invert_unit_ball(&class(2, 1, 1)).unwrap(), class(2, 1, 1));
        assert_eq!(invert_unit_ball(&class(5, 3, 1)).unwrap(), class(5, 2, 1));
        assert_eq!(invert_unit_ball(&class(5, 10, 2)), Err(Error::NotAUnitBall));
        assert_eq!(invert_unit_ball(&PAdicBall::zp(5)), Err(Error::NotAUnitBall));
    }

    fn small_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (-2000i64..2000, 1i64..2000).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn valuation_is_additive(p in small_prime(), q in nonzero_rational(), r in nonzero_rational()) {
            let lhs = valuation(p, &(&q * &r)).finite().unwrap();
            let rhs = valuation(p, &q).finite().unwrap() + valuation(p, &r).finite().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ball_measure_and_centre(p in small_prime(), c in nonzero_rational(), rn in 1i64..500, rd in 1i64..500) {
            let radius = ratio(rn, rd);
            let ball = ball_intersect_zp(p, &c, &radius).unwrap();
            let cap = std::cmp::min(int(1), &radius * int(p as i64));
            prop_assert!(ball.measure() <= cap);
            if valuation(p, &c).at_least(0) && ball.kind != BallKind::Empty {
                prop_assert!(ball.contains(&c));
            }
        }

        #[test]
        fn unit_inversion_is_involutive(p in small_prime(), c in 1u64..100_000, m in 1u32..6) {
            prop_assume!(c % p != 0);
            let b = PAdicBall::class(p, c, m);
            let inv = invert_unit_ball(&b).unwrap();
            prop_assert_eq!(inv.measure(), b.measure());
            prop_assert_eq!(invert_unit_ball(&inv).unwrap(), b);
        }

        #[test]
        fn iota_length_is_p_times_measure(p in small_prime(), c in 0u64..100_000, m in 0u32..7) {
            let b = PAdicBall::class(p, c, m);
            let i = iota_inverse_ball(&b).unwrap();
            prop_assert_eq!(i.length(), int(p as i64) * rational::pow(p, -(m as i64)));
        }

        #[test]
        fn digits_reconstruct(p in small_prime(), q in nonzero_rational(), m in 1u32..8) {
            prop_assume!(valuation(p, &Rational::from_integer(q.denom().clone())) == Valuation::Finite(0));
            let d = digit_expand(p, &q, m).unwrap();
            let modulus = BigInt::from(p_power(p, m));
            let back = BigInt::from(d.value());
            let lhs = (back * q.denom() - q.numer()).mod_floor(&modulus);
            prop_assert!(lhs.is_zero());
        }
    }
}
