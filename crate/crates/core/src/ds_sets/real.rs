//! The real-line analogue (`p = ∞`): stage sets are unions of closed
//! intervals intersected with `[0, 1]`, measured by Lebesgue measure.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{centres, check_range, FamilyTag};
use crate::constructions::PsiRule;
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Sorted, pairwise disjoint closed intervals inside `[0, 1]`.
/// Degenerate intervals are dropped, since they are null.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalUnion {
    parts: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_intervals<I>(intervals: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let (zero, one) = (int(0), int(1));
        let mut clipped: Vec<_> = intervals
            .into_iter()
            .map(|(a, b)| (a.max(zero.clone()), b.min(one.clone())))
            .filter(|(a, b)| a < b)
            .collect();
        clipped.sort();
        let mut parts: Vec<(Rational, Rational)> = Vec::with_capacity(clipped.len());
        for (a, b) in clipped {
            match parts.last_mut() {
                Some((_, end)) if a <= *end => {
                    if b > *end {
                        *end = b;
                    }
                }
                _ => parts.push((a, b)),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[(Rational, Rational)] {
        &self.parts
    }

    pub fn measure(&self) -> Rational {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        Self::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }
}

/// Stage set on `[0, 1]`: closed intervals of radius `psi(n)/n` about the
/// family's centres.
pub fn real_stage_set(family: FamilyTag, n: u64, psi_n: &Rational) -> Result<IntervalUnion> {
    if n == 0 {
        return Err(Error::InvalidInput("stage index must be at least 1".into()));
    }
    if psi_n.is_negative() {
        return Err(Error::InvalidRadius(psi_n.to_string()));
    }
    if psi_n.is_zero() {
        return Ok(IntervalUnion::new());
    }
    let r = psi_n / int(n);
    Ok(IntervalUnion::from_intervals(centres(family, n, None).into_iter().map(|c| (&c - &r, &c + &r))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealTailReport {
    pub family: FamilyTag,
    pub range: (u64, u64),
    #[serde(with = "rational::serde_fraction")]
    pub measure: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub series: Rational,
}

pub fn real_tail_union(family: FamilyTag, psi: &PsiRule, lo: u64, hi: u64) -> Result<RealTailReport> {
    check_range(lo, hi)?;
    let mut union = IntervalUnion::new();
    let mut series = Rational::zero();
    for (n, v) in psi.support(lo, hi)? {
        let stage = real_stage_set(family, n, &v)?;
        series += stage.measure();
        union = union.union(&stage);
    }
    Ok(RealTailReport { family, range: (lo, hi), measure: union.measure(), series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn merging_and_clipping() {
        let u = IntervalUnion::from_intervals([
            (ratio(-1, 2), ratio(1, 4)),
            (ratio(1, 8), ratio(1, 2)),
            (ratio(3, 4), int(2)),
            (ratio(1, 3), ratio(1, 3)),
        ]);
        assert_eq!(u.parts().len(), 2);
        assert_eq!(u.measure(), ratio(3, 4));
    }

    #[test]
    fn prime_stage_is_an_initial_segment() {
        // centres +-1/q, +-q with radius x: [0, x + 1/q] once x >= 1/q
        let s = real_stage_set(FamilyTag::FrakA, 7, &ratio(7, 2)).unwrap();
        assert_eq!(s.parts(), &[(int(0), ratio(1, 2) + ratio(1, 7))]);
        // below that threshold the two balls about +-1/q leave a gap at 0
        let s = real_stage_set(FamilyTag::FrakA, 7, &ratio(7, 10)).unwrap();
        assert_eq!(s.parts(), &[(ratio(1, 7) - ratio(1, 10), ratio(1, 7) + ratio(1, 10))]);
    }
}
