use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use super::CheckReport;
use crate::ds_sets::real::{real_stage_set, IntervalUnion};
use crate::ds_sets::FamilyTag;
use crate::error::{Error, Result};
use crate::number_theory::{next_prime, primes_up_to};
use crate::rational::{self, int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealTail {
    /// The least prime `q_0 >= Q`.
    pub q0: u64,
    /// `|union_{q >= Q prime} [0, x + 1/q] ∩ [0, 1]| = min(1, x + 1/q_0)`.
    #[serde(with = "rational::serde_fraction")]
    pub measure: Rational,
    /// The value as `Q -> infinity`.
    #[serde(with = "rational::serde_fraction")]
    pub limit: Rational,
}

pub fn real_case_tail(x: &Rational, big_q: u64) -> Result<RealTail> {
    if *x < Rational::zero() || *x > Rational::one() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    if big_q < 2 {
        return Err(Error::InvalidInput(format!("Q = {big_q} is below 2")));
    }
    let q0 = next_prime(big_q);
    let measure = (x + ratio(1, q0)).min(int(1));
    Ok(RealTail { q0, measure, limit: x.clone() })
}

/// Compares [`real_case_tail`] with an explicit interval union over the
/// primes in `[Q, 4Q + 100]`, and checks the values decrease towards `x`.
///
/// The quantity `stage_route` is the union of the actual stage sets of the
/// prime rule over the same primes. It agrees with the formula once
/// `x >= 1/q_0`; below that the stage set about `1/q` does not reach `0`.
pub fn real_tail_diagnostic(x: &Rational, qs: &[u64]) -> Result<CheckReport> {
    let mut report = CheckReport::new("real-tail", json!({ "x": rational::to_fraction(x), "Q": qs }));
    let mut previous: Option<Rational> = None;
    for &big_q in qs {
        let tail = real_case_tail(x, big_q)?;
        let primes: Vec<u64> = primes_up_to(4 * big_q + 100).into_iter().filter(|&q| q >= big_q).collect();
        let explicit = IntervalUnion::from_intervals(primes.iter().map(|&q| (int(0), x + ratio(1, q))));
        let mut stages = IntervalUnion::new();
        for &q in &primes {
            stages = stages.union(&real_stage_set(FamilyTag::FrakA, q, &(int(q) * x))?);
        }
        let key = |s: &str| format!("Q={big_q}:{s}");
        report.rational(&key("measure"), &tail.measure);
        report.rational(&key("stage_route"), &stages.measure());
        report.expect(
            explicit.measure() == tail.measure,
            || json!({ "Q": big_q, "explicit": rational::to_fraction(&explicit.measure()) }),
        );
        report.expect(tail.measure >= tail.limit, || json!({ "Q": big_q, "below_limit": true }));
        if let Some(prev) = &previous {
            report.expect(tail.measure <= *prev, || json!({ "Q": big_q, "increased": true }));
        }
        previous = Some(tail.measure);
    }
    report.rational("limit", x);
    Ok(report.finish())
}
