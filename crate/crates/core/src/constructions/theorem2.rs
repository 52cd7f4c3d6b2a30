//! Residue tables for the unitary-split construction of any target `x`.
//!
//! Write `x = sum x_k p^{-k-1}` and let `K` be the first index with
//! `x_k < p - 1`. Shells below `K` are filled completely. Shell `K` (and
//! `K + 1` when `p` is 3 or 5) receives balls of depth `k + 1` about the
//! classes in `I_{x_k}` and balls of depth `k + i + 1` about
//! `g + b' p^i` for `1 <= b' <= b_{k,i}`, where the `b_{k,i}` are the digits
//! of a remainder `r_k`.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::spectrum::digit_of;
use crate::error::{Error, Result};
use crate::number_theory::{self as nt, dirichlet_prime};
use crate::rational::{self, int, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseId {
    /// `p > 5`, `p = 1 mod 4`
    #[serde(rename = "1")]
    One,
    /// `p > 5`, `p = 3 mod 4`
    #[serde(rename = "2")]
    Two,
    /// `p = 2`
    #[serde(rename = "3")]
    Three,
    /// `p = 3` or `p = 5`
    #[serde(rename = "4")]
    Four,
}

impl CaseId {
    pub fn for_prime(p: u64) -> CaseId {
        match p {
            2 => CaseId::Three,
            3 | 5 => CaseId::Four,
            _ if p % 4 == 1 => CaseId::One,
            _ => CaseId::Two,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            CaseId::One => 1,
            CaseId::Two => 2,
            CaseId::Three => 3,
            CaseId::Four => 4,
        }
    }
}

/// Which clause of the rule produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RulePart {
    /// The whole shell `p^k Z_p^x`.
    Shell {
        k: u32,
    },
    /// `q = m mod p` with `m ∈ I_{x_k}`.
    #[serde(rename = "I")]
    IClass {
        k: u32,
        m: u64,
    },
    /// `q = g + b p^i mod p^{i+1}`.
    #[serde(rename = "B")]
    BClass {
        k: u32,
        i: u32,
        b: u32,
    },
    /// A prime carrying `psi(q) = q x`.
    Prime,
    /// A prime carrying `psi(q) = q`.
    Full,
    Table,
}

impl fmt::Display for RulePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RulePart::Shell { k } => write!(f, "shell k={k}"),
            RulePart::IClass { k, m } => write!(f, "I k={k} m={m}"),
            RulePart::BClass { k, i, b } => write!(f, "B k={k} i={i} b={b}"),
            RulePart::Prime => write!(f, "prime"),
            RulePart::Full => write!(f, "full"),
            RulePart::Table => write!(f, "table"),
        }
    }
}

/// Data for one shell index `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelTable {
    pub k: u32,
    pub x_k: u32,
    /// `I_{x_k}`, sorted residues mod `p`.
    pub classes: Vec<u64>,
    #[serde(with = "rational::serde_fraction")]
    pub r: Rational,
    /// `b[i - 1] = b_{k,i}` for `1 <= i <= depth`.
    pub b: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case2Tables {
    pub p: u64,
    #[serde(with = "rational::serde_fraction")]
    pub x: Rational,
    pub case: CaseId,
    pub g: u64,
    /// `K = min{k : x_k < p - 1}`.
    pub top: u32,
    pub depth: u32,
    pub levels: Vec<LevelTable>,
}

fn i_classes(case: CaseId, p: u64, g: u64, a: u32) -> Vec<u64> {
    let a64 = a as u64;
    let gp = |i: u64| nt::pow_mod(g, i, p);
    let mut out: Vec<u64> = match case {
        _ if a64 == p - 1 => (1..p).collect(),
        CaseId::Three => vec![],
        CaseId::One if a < 4 => vec![],
        CaseId::One => {
            let mut v = vec![1, gp((p - 1) / 4)];
            v.extend((2..=a64 / 4).map(gp));
            v
        }
        CaseId::Two | CaseId::Four if a < 2 => vec![],
        CaseId::Two | CaseId::Four => {
            let mut v = vec![1];
            v.extend((2..=(a64 + 2) / 4).map(gp));
            v
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// `sum_{l > k} x_l p^{k-l}`, the fractional part of `p^{k+1} x`.
fn tail(p: u64, x: &Rational, k: u32) -> Rational {
    rational::frac(&(x * rational::pow(p, k as i64 + 1)))
}

fn remainder(case: CaseId, p: u64, x: &Rational, top: u32, k: u32, x_k: u32) -> Rational {
    if x_k as u64 == p - 1 {
        return Rational::zero();
    }
    let xk = int(x_k);
    match case {
        CaseId::One | CaseId::Three => int(x_k % 4) + tail(p, x, k),
        CaseId::Two => {
            let s = xk + tail(p, x, k);
            if x_k < 2 {
                s
            } else {
                s - int(4 * ((x_k - 2) / 4) + 2)
            }
        }
        CaseId::Four if k == top => int(x_k % 2) + tail(p, x, k + 1) / int(p),
        CaseId::Four => int(x_k % 2),
    }
}

/// First `depth` digits of `y ∈ [0, 1)` after the point, base `p`.
fn schedule(p: u64, y: &Rational, depth: u32) -> Vec<u32> {
    (1..=depth).map(|i| digit_of(p, y, i - 1)).collect()
}

/// Builds the tables for `x ∈ [0, 1)` with `b`-schedules cut at `depth`.
pub fn theorem2_tables(p: u64, x: &Rational, depth: u32) -> Result<Case2Tables> {
    if !nt::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if *x < Rational::zero() || *x > Rational::one() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    if x.is_one() {
        return Err(Error::RepresentsOne);
    }
    let top = (0..).find(|&k| (digit_of(p, x, k) as u64) < p - 1).expect("x < 1");
    let case = CaseId::for_prime(p);
    let g = match (case, p) {
        (CaseId::Three, _) => 1,
        (CaseId::Four, 3) => 2,
        (CaseId::Four, _) => 3,
        _ => nt::primitive_root(p)?,
    };
    let last = if case == CaseId::Four { top + 1 } else { top };
    let levels = (0..=last)
        .map(|k| {
            let x_k = digit_of(p, x, k);
            let r = remainder(case, p, x, top, k, x_k);
            let y = if case == CaseId::Three { &r / int(2) } else { &r / int(4) };
            LevelTable { k, x_k, classes: i_classes(case, p, g, x_k), b: schedule(p, &y, depth), r }
        })
        .collect();
    Ok(Case2Tables { p, x: x.clone(), case, g, top, depth, levels })
}

/// A stage index chosen for one residue class of the rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub q: u64,
    pub part: RulePart,
    #[serde(with = "rational::serde_fraction")]
    pub psi: Rational,
}

impl Case2Tables {
    pub fn level(&self, k: u32) -> Option<&LevelTable> {
        self.levels.get(k as usize)
    }

    /// Largest shell index carrying support.
    pub fn last_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// `f_k(q)` together with the clause that fired; `None` means zero.
    pub fn f(&self, k: u32, q: u64) -> Option<(Rational, RulePart)> {
        let level = self.level(k)?;
        let p = self.p;
        if q == p || !nt::is_prime(q) {
            return None;
        }
        let m = q % p;
        if level.classes.binary_search(&m).is_ok() {
            return Some((ratio(q, p), RulePart::IClass { k, m }));
        }
        if m != self.g % p {
            return None;
        }
        let t = q as i128 - self.g as i128;
        if t == 0 {
            return None;
        }
        let mut i = 0u32;
        let mut rest = t;
        while rest % p as i128 == 0 {
            rest /= p as i128;
            i += 1;
        }
        let b = rest.rem_euclid(p as i128) as u32;
        if i == 0 || i > self.depth || b == 0 || b > level.b[i as usize - 1] {
            return None;
        }
        let psi = ratio(q, p.pow(i + 1));
        Some((psi, RulePart::BClass { k, i, b }))
    }

    /// Residue classes `(residue, modulus, part)` that carry support.
    pub fn classes(&self) -> Vec<(u64, u64, RulePart)> {
        let p = self.p;
        let mut out = Vec::new();
        for level in &self.levels {
            let k = level.k;
            out.extend(level.classes.iter().map(|&m| (m, p, RulePart::IClass { k, m })));
            for (i, &bi) in (1u32..).zip(&level.b) {
                let pi = p.pow(i);
                for b in 1..=bi {
                    out.push(((self.g + b as u64 * pi) % (pi * p), pi * p, RulePart::BClass { k, i, b }));
                }
            }
        }
        out
    }

    /// One Dirichlet prime (the least) per supported class, searched up to `cap`.
    pub fn witnesses(&self, cap: u64) -> Result<Vec<Witness>> {
        let p = self.p;
        self.classes()
            .into_iter()
            .map(|(residue, modulus, part)| {
                let k = match part {
                    RulePart::IClass { k, .. } | RulePart::BClass { k, .. } => k,
                    _ => unreachable!(),
                };
                let q = dirichlet_prime(residue as i64, modulus, 1, cap)?;
                let (psi, fired) = self
                    .f(k, q)
                    .ok_or_else(|| Error::PreconditionFailed(format!("witness {q} for {part} carries no value")))?;
                if fired != part {
                    return Err(Error::PreconditionFailed(format!("witness {q} fired {fired}, not {part}")));
                }
                Ok(Witness { n: p.pow(k) * q, q, part, psi })
            })
            .collect()
    }

    /// The measure the construction is designed to reach. Computed from the
    /// digit data alone, with no ball arithmetic.
    pub fn predicted_measure(&self) -> Rational {
        let p = self.p;
        let pw = |e: i64| rational::pow(p, e);
        let b_mass =
            |level: &LevelTable| -> Rational { (1i64..).zip(&level.b).map(|(i, &b)| int(b) * pw(-i - 1)).sum() };
        let top = self.top as i64;
        let prefix: Rational = (0..top).map(|k| int(p - 1) * pw(-k - 1)).sum();
        let level = &self.levels[self.top as usize];
        let x_k = level.x_k;
        let tail = match self.case {
            CaseId::One => pw(-top) * (ratio(4 * (x_k / 4), p) + int(4) * b_mass(level)),
            CaseId::Two => {
                let i_mass = if x_k >= 2 { 4 * ((x_k - 2) / 4) + 2 } else { 0 };
                pw(-top) * (ratio(i_mass, p) + int(4) * b_mass(level))
            }
            CaseId::Three => pw(-top) * int(2) * b_mass(level),
            CaseId::Four => self.levels[self.top as usize..]
                .iter()
                .map(|l| pw(-(l.k as i64)) * (ratio(2 * (l.x_k / 2), p) + int(4) * b_mass(l)))
                .sum(),
        };
        prefix + tail
    }

    /// Upper bound on `x - predicted_measure()` coming from the cut at `depth`.
    pub fn truncation_bound(&self) -> Rational {
        int(4) * rational::pow(self.p, -(self.top as i64) - self.depth as i64)
    }
}
