//! Stage sets of the five approximation families and finite tail unions.
//!
//! A stage set is a union of clipped balls `B(c, psi(n)/n) ∩ Z_p` over a
//! family-specific list of centres. For the two families whose centre list
//! grows with `n` (`A` and `C`) the generators work on residues: every
//! centre ball is a class modulo `p^M`, so it suffices to know which
//! residues of the numerator (or denominator) are attained, and that is an
//! exact Moebius count when `p^M` is small compared with `n`.

pub mod real;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball_set::BallSet;
use crate::constructions::PsiRule;
use crate::error::{Error, Result};
use crate::number_theory::{self as nt, count_coprime_in_progression};
use crate::padic;
use crate::rational::{self, int, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyTag {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "fa")]
    FrakA,
    #[serde(rename = "fk")]
    FrakK,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [FamilyTag::A, FamilyTag::C, FamilyTag::B, FamilyTag::FrakA, FamilyTag::FrakK];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::A => "a",
            FamilyTag::C => "c",
            FamilyTag::B => "b",
            FamilyTag::FrakA => "fa",
            FamilyTag::FrakK => "fk",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown family {s:?}")))
    }
}

/// Centres of the stage-`n` balls. `p = None` selects the real-line
/// convention for `C` (coprimality with `n` only).
pub fn centres(family: FamilyTag, n: u64, p: Option<u64>) -> Vec<Rational> {
    let ni = n as i64;
    match family {
        FamilyTag::A => (-ni..=ni).filter(|a| nt::gcd(a.unsigned_abs(), n) == 1).map(|a| ratio(a, ni)).collect(),
        FamilyTag::C => {
            let modulus = p.map_or(n, |p| p * n);
            (1 - ni..ni).filter(|a| nt::gcd(a.unsigned_abs(), modulus) == 1).map(|a| ratio(ni, a)).collect()
        }
        FamilyTag::B => {
            let mut out = centres(FamilyTag::A, n, p);
            out.extend(centres(FamilyTag::C, n, p));
            out
        }
        FamilyTag::FrakK => signed(divisor_centres(n, false)),
        FamilyTag::FrakA => signed(divisor_centres(n, true)),
    }
}

fn divisor_centres(n: u64, unitary: bool) -> Vec<Rational> {
    let f = nt::factorize(n).expect("n >= 1");
    let ds = if unitary { f.unitary_divisors() } else { f.divisors() };
    ds.into_iter().map(|d| ratio(d, n / d)).collect()
}

fn signed(cs: Vec<Rational>) -> Vec<Rational> {
    cs.into_iter().flat_map(|c| [c.clone(), -c]).collect()
}

/// Inserts every clipped centre ball one by one. Exact for any radius.
fn insert_direct(set: &mut BallSet, family: FamilyTag, n: u64, radius: &Rational) -> Result<()> {
    let p = set.p();
    for c in centres(family, n, Some(p)) {
        set.insert(&padic::ball_intersect_zp(p, &c, radius)?)?;
    }
    Ok(())
}

/// `p^m` if it fits comfortably in a `u64`.
fn small_power(p: u64, m: u32) -> Option<u64> {
    p.checked_pow(m).filter(|&v| v < 1 << 62)
}

/// Residues modulo `m` attained by integers `a` with `|a| <= limit`, free
/// of `primes` and, if `units_only`, prime to `p`. Chooses between the
/// Moebius count per residue and direct enumeration, whichever is cheaper.
fn attained_residues(primes: &[u64], limit: u64, m: u64, p: u64, units_only: bool) -> Vec<u64> {
    let per_residue = (m as u128) << primes.len();
    if per_residue <= 2 * limit as u128 + 1 {
        (0..m)
            .filter(|c| !units_only || c % p != 0)
            .filter(|&c| count_coprime_in_progression(primes, limit, c, m) > 0)
            .collect()
    } else {
        let rad: u64 = primes.iter().product();
        let li = limit as i64;
        let hits: BTreeSet<u64> = (-li..=li)
            .filter(|a| nt::gcd(a.unsigned_abs(), rad) == 1)
            .filter(|a| !units_only || a % p as i64 != 0)
            .map(|a| a.rem_euclid(m as i64) as u64)
            .collect();
        hits.into_iter().collect()
    }
}

fn radius_of(n: u64, psi_n: &Rational) -> Result<Rational> {
    if psi_n.is_negative() {
        return Err(Error::InvalidRadius(psi_n.to_string()));
    }
    Ok(psi_n / int(n))
}

fn insert_a(set: &mut BallSet, n: u64, psi_n: &Rational) -> Result<()> {
    let p = set.p();
    let radius = radius_of(n, psi_n)?;
    if radius.is_zero() {
        if set.retains_singletons() {
            insert_direct(set, FamilyTag::A, n, &radius)?;
        }
        return Ok(());
    }
    let m = padic::depth_for_radius(p, &radius);
    let k = nt::valuation_u64(p, n) as i64;
    if m <= 0 {
        // a = 1 attains the smallest valuation -k; with k = 0 some centre is integral
        if k == 0 || -k >= m {
            set.insert_class(&BigUint::zero(), 0);
        }
        return Ok(());
    }
    if k > 0 {
        return Ok(()); // every centre has valuation -k < 0
    }
    let m = m as u32;
    let Some(modulus) = small_power(p, m) else {
        return insert_direct(set, FamilyTag::A, n, &radius);
    };
    let primes: Vec<u64> = nt::factorize(n)?.primes().collect();
    let n_inv = nt::inv_mod(n as i128, modulus).expect("p does not divide n");
    for c in attained_residues(&primes, n, modulus, p, false) {
        set.insert_class(&BigUint::from(nt::mul_mod(c, n_inv, modulus)), m);
    }
    Ok(())
}

fn insert_c(set: &mut BallSet, n: u64, psi_n: &Rational) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    let p = set.p();
    let radius = radius_of(n, psi_n)?;
    if radius.is_zero() {
        if set.retains_singletons() {
            insert_direct(set, FamilyTag::C, n, &radius)?;
        }
        return Ok(());
    }
    let m = padic::depth_for_radius(p, &radius);
    let k = nt::valuation_u64(p, n);
    if m <= k as i64 {
        // a = 1 is admissible and every centre lies in p^k Z_p
        set.insert_class(&BigUint::zero(), m.max(0) as u32);
        return Ok(());
    }
    let m = m as u32;
    let e = m - k;
    let (Some(modulus), Some(_)) = (small_power(p, e), small_power(p, m)) else {
        return insert_direct(set, FamilyTag::C, n, &radius);
    };
    let pk = p.pow(k);
    let core = n / pk;
    let primes: Vec<u64> = nt::factorize(core)?.primes().collect();
    for c in attained_residues(&primes, n - 1, modulus, p, true) {
        let c_inv = nt::inv_mod(c as i128, modulus).expect("unit residue");
        let unit = nt::mul_mod(core % modulus, c_inv, modulus);
        set.insert_class(&(BigUint::from(unit) * BigUint::from(pk)), m);
    }
    Ok(())
}

/// Adds the stage-`n` set of `family` to `set`.
pub fn insert_stage(set: &mut BallSet, family: FamilyTag, n: u64, psi_n: &Rational) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("stage index must be at least 1".into()));
    }
    match family {
        FamilyTag::A => insert_a(set, n, psi_n),
        FamilyTag::C => insert_c(set, n, psi_n),
        FamilyTag::B => {
            insert_a(set, n, psi_n)?;
            insert_c(set, n, psi_n)
        }
        FamilyTag::FrakA | FamilyTag::FrakK => {
            let radius = radius_of(n, psi_n)?;
            insert_direct(set, family, n, &radius)
        }
    }
}

pub fn stage_set(family: FamilyTag, p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    let mut set = BallSet::new(p);
    insert_stage(&mut set, family, n, psi_n)?;
    Ok(set)
}

pub fn set_a_n(p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    stage_set(FamilyTag::A, p, n, psi_n)
}

pub fn set_c_n(p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    stage_set(FamilyTag::C, p, n, psi_n)
}

pub fn set_b_n(p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    stage_set(FamilyTag::B, p, n, psi_n)
}

pub fn set_fk_n(p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    stage_set(FamilyTag::FrakK, p, n, psi_n)
}

pub fn set_fa_n(p: u64, n: u64, psi_n: &Rational) -> Result<BallSet> {
    stage_set(FamilyTag::FrakA, p, n, psi_n)
}

/// Running union and measure series. Merging is associative and
/// commutative, so partial accumulators may be combined in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailAccumulator {
    pub union: BallSet,
    pub series: Rational,
}

impl TailAccumulator {
    pub fn new(p: u64) -> Self {
        Self { union: BallSet::new(p), series: Rational::zero() }
    }

    pub fn add(&mut self, stage: &BallSet) -> Result<()> {
        self.series += stage.measure();
        self.union = self.union.union(stage)?;
        Ok(())
    }

    pub fn merge(self, other: TailAccumulator) -> Result<TailAccumulator> {
        Ok(TailAccumulator { union: self.union.union(&other.union)?, series: self.series + other.series })
    }

    pub fn finish(self, family: FamilyTag, range: (u64, u64)) -> TailReport {
        TailReport {
            family,
            p: self.union.p(),
            range,
            measure: self.union.measure(),
            union: self.union,
            series: self.series,
        }
    }
}

/// Finite stage of a limsup set: `∪_{N <= n <= T} S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailReport {
    pub family: FamilyTag,
    pub p: u64,
    pub range: (u64, u64),
    pub union: BallSet,
    #[serde(with = "rational::serde_fraction")]
    pub measure: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub series: Rational,
}

pub fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidInput(format!("empty or invalid range {lo}:{hi}")));
    }
    Ok(())
}

pub fn tail_union(family: FamilyTag, p: u64, psi: &PsiRule, lo: u64, hi: u64) -> Result<TailReport> {
    check_range(lo, hi)?;
    let mut acc = TailAccumulator::new(p);
    for (n, v) in psi.support(lo, hi)? {
        acc.add(&stage_set(family, p, n, &v)?)?;
    }
    Ok(acc.finish(family, (lo, hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valuation;
    use num_bigint::BigInt;

    /// `|x - c|_p <= r`, straight from the definition.
    fn brute_in_ball(p: u64, x: &BigInt, c: &Rational, r: &Rational) -> bool {
        let diff = Rational::from_integer(x.clone()) - c;
        match padic::valuation(p, &diff) {
            Valuation::Infinite => true,
            Valuation::Finite(v) => rational::pow(p, -v) <= *r,
        }
    }
    use proptest::prelude::*;

    /// Measure of the stage set by brute force over residues mod `p^depth`,
    /// using only the defining inequality on integer representatives.
    fn oracle_measure(family: FamilyTag, p: u64, n: u64, psi: &Rational) -> Rational {
        let r = psi / int(n);
        if r.is_zero() {
            return int(0);
        }
        // every centre ball is a union of classes at this depth
        let depth = (1u32..).find(|&d| rational::pow(p, -(d as i64)) <= r).unwrap();
        let cs = centres(family, n, Some(p));
        let modulus = p.pow(depth);
        let hits = (0..modulus).filter(|&x| cs.iter().any(|c| brute_in_ball(p, &BigInt::from(x), c, &r))).count();
        ratio(hits as i64, modulus as i64)
    }

    fn shell(p: u64, k: u32) -> BallSet {
        BallSet::shell(p, k)
    }

    #[test]
    fn a_examples() {
        assert_eq!(oracle_measure(FamilyTag::A, 2, 3, &ratio(3, 2)), int(1));
        assert!(set_a_n(2, 3, &ratio(3, 2)).unwrap().is_full());
        assert!(set_a_n(3, 3, &ratio(1, 3)).unwrap().is_null());
        assert_eq!(set_a_n(3, 2, &ratio(2, 3)).unwrap(), shell(3, 0));
    }

    #[test]
    fn c_examples() {
        assert_eq!(oracle_measure(FamilyTag::C, 3, 5, &ratio(5, 3)), ratio(2, 3));
        assert_eq!(set_c_n(3, 5, &ratio(5, 3)).unwrap(), shell(3, 0));
        for p in [2, 3, 7] {
            assert!(set_c_n(p, 1, &int(100)).unwrap().is_null());
        }
        let s = set_c_n(3, 5, &int(0)).unwrap();
        assert_eq!(s.measure(), int(0));
        let mut kept = BallSet::retaining_singletons(3);
        insert_stage(&mut kept, FamilyTag::C, 5, &int(0)).unwrap();
        assert!(kept.contains(&ratio(5, 2)));
        assert_eq!(kept.measure(), int(0));
    }

    #[test]
    fn b_examples() {
        let psi = ratio(5, 3);
        let b = set_b_n(3, 5, &psi).unwrap();
        let u = set_a_n(3, 5, &psi).unwrap().union(&set_c_n(3, 5, &psi).unwrap()).unwrap();
        assert_eq!(b, u);
        for r in [int(0), ratio(1, 2), int(3)] {
            assert_eq!(set_b_n(5, 1, &r).unwrap(), set_a_n(5, 1, &r).unwrap());
        }
        assert_eq!(set_b_n(3, 2, &ratio(2, 3)).unwrap(), shell(3, 0));
    }

    #[test]
    fn fk_examples() {
        let s = set_fk_n(2, 4, &ratio(1, 2)).unwrap();
        assert_eq!(oracle_measure(FamilyTag::FrakK, 2, 4, &ratio(1, 2)), ratio(3, 8));
        assert_eq!(s.measure(), ratio(3, 8));
        assert_eq!(s, BallSet::from_classes(2, [(1u32, 3), (7, 3), (4, 3)].map(|(c, d)| (BigUint::from(c), d))));
        let one = set_fk_n(5, 1, &ratio(1, 25)).unwrap();
        assert_eq!(one, BallSet::from_classes(5, [(1u32, 2), (24, 2)].map(|(c, d)| (c.into(), d))));
        assert_eq!(set_fk_n(3, 5, &ratio(5, 3)).unwrap(), shell(3, 0));
    }

    #[test]
    fn fa_examples() {
        for q in [5u64, 13, 29, 37] {
            let s = set_fa_n(2, q, &ratio(q as i64, 8)).unwrap();
            assert_eq!(s, BallSet::from_classes(2, [(3u32, 3), (5, 3)].map(|(c, d)| (c.into(), d))));
        }
        // radius 1/48 closes at depth 6; classes 4/3 = 44, -4/3 = 20, 12, -12 = 52 mod 64
        let s = set_fa_n(2, 12, &ratio(1, 4)).unwrap();
        assert_eq!(oracle_measure(FamilyTag::FrakA, 2, 12, &ratio(1, 4)), ratio(1, 16));
        let expected = [(44u32, 6), (20, 6), (12, 6), (52, 6)];
        assert_eq!(s, BallSet::from_classes(2, expected.map(|(c, d)| (c.into(), d))));
        assert_eq!(s.measure(), ratio(1, 16));
        assert!(set_fa_n(7, 1, &int(0)).unwrap().is_null());
        let mut kept = BallSet::retaining_singletons(7);
        insert_stage(&mut kept, FamilyTag::FrakA, 1, &int(0)).unwrap();
        assert!(kept.contains(&int(1)) && kept.contains(&int(-1)));
    }

    #[test]
    fn residue_route_agrees_with_direct_route() {
        for p in [2u64, 3, 5] {
            for n in 1..80u64 {
                for (num, den) in [(1, 1), (1, 3), (2, 7), (9, 5), (40, 1), (1, 50)] {
                    let psi = ratio(num, den);
                    for family in [FamilyTag::A, FamilyTag::C] {
                        let fast = stage_set(family, p, n, &psi).unwrap();
                        let mut slow = BallSet::new(p);
                        insert_direct(&mut slow, family, n, &(&psi / int(n))).unwrap();
                        if family == FamilyTag::C && n == 1 {
                            slow = BallSet::new(p);
                        }
                        assert_eq!(fast, slow, "{family} p={p} n={n} psi={psi}");
                    }
                }
            }
        }
    }

    #[test]
    fn tail_examples() {
        let zero = PsiRule::Zero;
        for family in FamilyTag::ALL {
            let rep = tail_union(family, 3, &zero, 1, 40).unwrap();
            assert_eq!(rep.measure, int(0));
            assert_eq!(rep.series, int(0));
        }
        assert!(tail_union(FamilyTag::A, 3, &zero, 5, 4).is_err());
        assert!(tail_union(FamilyTag::A, 3, &zero, 0, 4).is_err());
        let rep = tail_union(FamilyTag::C, 3, &PsiRule::table([(5, ratio(5, 3))]), 1, 10).unwrap();
        let js = serde_json::to_string(&rep).unwrap();
        assert_eq!(
            js,
            r#"{"family":"c","p":3,"range":[1,10],"union":{"p":3,"classes":[[1,1],[2,1]]},"measure":"2/3","series":"2/3"}"#
        );
    }

    fn family() -> impl Strategy<Value = FamilyTag> {
        prop::sample::select(FamilyTag::ALL.to_vec())
    }

    fn prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn generators_match_oracle(f in family(), p in prime(), n in 1u64..30, num in 0i64..60, den in 1i64..20) {
            let psi = ratio(num, den);
            let r = &psi / int(n);
            prop_assume!(r.is_zero() || r >= ratio(1, 2048));
            let set = stage_set(f, p, n, &psi).unwrap();
            prop_assert_eq!(set.measure(), oracle_measure(f, p, n, &psi));
        }

        #[test]
        fn scaling_down_shrinks(f in family(), p in prime(), n in 1u64..60, num in 1i64..60, den in 1i64..20, s in 1i64..10) {
            let psi = ratio(num, den);
            let small = &psi * ratio(s, 10);
            let big = stage_set(f, p, n, &psi).unwrap();
            prop_assert!(stage_set(f, p, n, &small).unwrap().is_subset(&big).unwrap());
        }

        #[test]
        fn unitary_inside_divisor(p in prime(), n in 1u64..400, num in 0i64..60, den in 1i64..20) {
            let psi = ratio(num, den);
            prop_assert!(set_fa_n(p, n, &psi).unwrap().is_subset(&set_fk_n(p, n, &psi).unwrap()).unwrap());
        }

        #[test]
        fn b_is_a_union_c(p in prime(), n in 1u64..200, num in 0i64..60, den in 1i64..20) {
            let psi = ratio(num, den);
            let u = set_a_n(p, n, &psi).unwrap().union(&set_c_n(p, n, &psi).unwrap()).unwrap();
            prop_assert_eq!(set_b_n(p, n, &psi).unwrap(), u);
        }

        #[test]
        fn small_radius_c_stays_on_its_shell(p in prime(), k in 0u32..3, m in 2u64..200, num in 1i64..5) {
            prop_assume!(m % p != 0);
            let n = p.pow(k) * m;
            // psi(n)/n <= p^{-k-2}
            let psi = int(n) * rational::pow(p, -(k as i64) - 2) * ratio(num, 5);
            prop_assert!(set_c_n(p, n, &psi).unwrap().is_subset(&BallSet::shell(p, k)).unwrap());
        }

        #[test]
        fn tail_monotone_in_range(p in prime(), lo in 1u64..20, span in 0u64..30, extra in 0u64..10) {
            let psi = PsiRule::table((1..=60u64).map(|n| (n, ratio((n % 7) as i64, 3))));
            let hi = lo + span;
            let base = tail_union(FamilyTag::C, p, &psi, lo, hi).unwrap();
            let later = tail_union(FamilyTag::C, p, &psi, lo + extra.min(span), hi).unwrap();
            let longer = tail_union(FamilyTag::C, p, &psi, lo, hi + extra).unwrap();
            prop_assert!(later.measure <= base.measure);
            prop_assert!(base.measure <= longer.measure);
            prop_assert!(base.measure <= base.series.clone().min(int(1)));
        }
    }
}
