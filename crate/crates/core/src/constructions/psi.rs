use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::spectrum::SpectrumDigits;
use super::theorem2::{Case2Tables, RulePart};
use crate::error::{Error, Result};
use crate::number_theory::{self as nt};
use crate::rational::{self, int, ratio, Rational};

/// An approximation function `psi: N -> Q_{>=0}` given by a rule.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiRule {
    Zero,
    /// Finitely supported; absent entries are zero.
    Table(BTreeMap<u64, Rational>),
    /// `psi(n) = x_{v(n)} n / p^{v(n)+1}` with `v = v_p`.
    Theorem1 {
        p: u64,
        digits: SpectrumDigits,
    },
    /// `psi(p^k q) = f_k(q)` for primes `q <= cap`.
    Theorem2 {
        tables: Box<Case2Tables>,
        cap: u64,
    },
    /// `psi(q) = q` on primes `q != p`.
    Theorem2Full {
        p: u64,
    },
    /// `psi(q) = q x` on primes.
    RealPrime {
        x: Rational,
    },
    /// `p psi(n)` where `psi(n) / n` is an integral power of `p`.
    Primed {
        base: Box<PsiRule>,
        p: u64,
    },
}

/// The index `l` of the zero-one decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroOneLevel {
    Finite(u32),
    Infinite,
    Unknown,
}

fn is_power_of(p: u64, q: &Rational) -> bool {
    if q.is_zero() {
        return false;
    }
    let bare = |mut n: num_bigint::BigInt| {
        let pb = num_bigint::BigInt::from(p);
        while (&n % &pb).is_zero() {
            n /= &pb;
        }
        n.is_one()
    };
    (q.numer().is_one() || bare(q.numer().clone())) && (q.denom().is_one() || bare(q.denom().clone()))
}

impl PsiRule {
    pub fn table(entries: impl IntoIterator<Item = (u64, Rational)>) -> PsiRule {
        PsiRule::Table(entries.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    /// Short rule name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            PsiRule::Zero => "zero",
            PsiRule::Table(_) => "table",
            PsiRule::Theorem1 { .. } => "theorem1",
            PsiRule::Theorem2 { .. } | PsiRule::Theorem2Full { .. } => "theorem2",
            PsiRule::RealPrime { .. } => "real-prime",
            PsiRule::Primed { .. } => "primed",
        }
    }

    pub fn eval(&self, n: u64) -> Rational {
        self.eval_part(n).map(|(v, _)| v).unwrap_or_else(Rational::zero)
    }

    /// `psi(n)` with the clause that produced it; `None` when `psi(n) = 0`.
    pub fn eval_part(&self, n: u64) -> Option<(Rational, RulePart)> {
        if n == 0 {
            return None;
        }
        match self {
            PsiRule::Zero => None,
            PsiRule::Table(map) => map.get(&n).map(|v| (v.clone(), RulePart::Table)),
            PsiRule::Theorem1 { p, digits } => {
                let k = nt::valuation_u64(*p, n);
                (digits.digit(k as usize) == 1)
                    .then(|| (ratio(n, 1) / rational::pow(*p, k as i64 + 1), RulePart::Shell { k }))
            }
            PsiRule::Theorem2 { tables, cap } => {
                let p = tables.p;
                let k = nt::valuation_u64(p, n);
                let q = n / p.pow(k);
                if q > *cap {
                    return None;
                }
                tables.f(k, q)
            }
            PsiRule::Theorem2Full { p } => (n != *p && nt::is_prime(n)).then(|| (int(n), RulePart::Full)),
            PsiRule::RealPrime { x } => (!x.is_zero() && nt::is_prime(n)).then(|| (int(n) * x, RulePart::Prime)),
            PsiRule::Primed { base, p } => {
                let (v, part) = base.eval_part(n)?;
                if is_power_of(*p, &(&v / int(n))) {
                    Some((v * int(*p), part))
                } else {
                    Some((v, part))
                }
            }
        }
    }

    /// All `(n, psi(n))` with `lo <= n <= hi` and `psi(n) > 0`, increasing in `n`.
    pub fn support(&self, lo: u64, hi: u64) -> Result<Vec<(u64, Rational)>> {
        Ok(self.support_parts(lo, hi)?.into_iter().map(|(n, v, _)| (n, v)).collect())
    }

    pub fn support_parts(&self, lo: u64, hi: u64) -> Result<Vec<(u64, Rational, RulePart)>> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty range {lo}:{hi}")));
        }
        let lo = lo.max(1);
        let keep = |n: u64| self.eval_part(n).map(|(v, part)| (n, v, part));
        let out = match self {
            PsiRule::Zero => vec![],
            PsiRule::Table(map) => map.range(lo..=hi).map(|(&n, v)| (n, v.clone(), RulePart::Table)).collect(),
            PsiRule::Theorem2 { tables, cap } => {
                let p = tables.p;
                let mut out = Vec::new();
                for k in 0..=tables.last_level() {
                    let Some(pk) = p.checked_pow(k) else { break };
                    let top = (hi / pk).min(*cap);
                    for q in nt::primes_up_to(top) {
                        let n = pk * q;
                        if n < lo {
                            continue;
                        }
                        if let Some((v, part)) = tables.f(k, q) {
                            out.push((n, v, part));
                        }
                    }
                }
                out.sort_by_key(|e| e.0);
                out
            }
            PsiRule::Theorem2Full { .. } | PsiRule::RealPrime { .. } => {
                nt::primes_up_to(hi).into_iter().filter(|&q| q >= lo).filter_map(keep).collect()
            }
            PsiRule::Theorem1 { .. } | PsiRule::Primed { .. } => (lo..=hi).filter_map(keep).collect(),
        };
        Ok(out)
    }

    /// The support restricted to the stage indices a construction uses:
    /// `n = p^k q` with `q` prime for the shell rule, the full support otherwise.
    pub fn construction_support(&self, lo: u64, hi: u64) -> Result<Vec<(u64, Rational, RulePart)>> {
        let parts = self.support_parts(lo, hi)?;
        Ok(match self {
            PsiRule::Theorem1 { p, .. } => parts
                .into_iter()
                .filter(|(n, _, _)| {
                    let q = n / p.pow(nt::valuation_u64(*p, *n));
                    q != 1 && nt::is_prime(q)
                })
                .collect(),
            _ => parts,
        })
    }

    /// The least `k` such that `psi(n)/n >= p^{-k}` for infinitely many `n ∈ p^k N`.
    pub fn zero_one_level(&self) -> ZeroOneLevel {
        match self {
            PsiRule::Zero | PsiRule::Table(_) | PsiRule::Theorem1 { .. } | PsiRule::Theorem2 { .. } => {
                ZeroOneLevel::Infinite
            }
            PsiRule::Theorem2Full { .. } => ZeroOneLevel::Finite(0),
            PsiRule::RealPrime { x } if x.is_one() => ZeroOneLevel::Finite(0),
            PsiRule::RealPrime { .. } => ZeroOneLevel::Infinite,
            PsiRule::Primed { .. } => ZeroOneLevel::Unknown,
        }
    }
}

/// The shell rule realizing `sum x_k (p-1) p^{-k-1}`.
pub fn theorem1_psi(p: u64, digits: SpectrumDigits) -> Result<PsiRule> {
    if !digits.is_binary() {
        return Err(Error::InvalidDigits(format!("{:?} is not binary", digits.digits)));
    }
    if digits.p != p {
        return Err(Error::PrimeMismatch { left: p, right: digits.p });
    }
    Ok(PsiRule::Theorem1 { p, digits })
}

/// The first `count` stage indices `p^k q` per shell `k` with `x_k = 1`,
/// taking primes `q > p`.
pub fn theorem1_stage_indices(rule: &PsiRule, count: usize) -> Vec<u64> {
    let PsiRule::Theorem1 { p, digits } = rule else {
        return vec![];
    };
    let mut out = Vec::new();
    for (k, &d) in digits.digits.iter().enumerate() {
        if d != 1 {
            continue;
        }
        let mut q = *p;
        for _ in 0..count {
            q = nt::next_prime(q + 1);
            out.push(p.pow(k as u32) * q);
        }
    }
    out.sort_unstable();
    out
}

pub fn theorem2_psi(tables: Case2Tables, cap: u64) -> PsiRule {
    PsiRule::Theorem2 { tables: Box::new(tables), cap }
}

pub fn real_prime_psi(x: Rational) -> Result<PsiRule> {
    if x < Rational::zero() || x > Rational::one() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    Ok(if x.is_zero() { PsiRule::Zero } else { PsiRule::RealPrime { x } })
}

pub fn psi_prime_transform(psi: PsiRule, p: u64) -> PsiRule {
    match psi {
        PsiRule::Zero => PsiRule::Zero,
        base => PsiRule::Primed { base: Box::new(base), p },
    }
}
