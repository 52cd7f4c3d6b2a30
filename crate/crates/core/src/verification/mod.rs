//! Executable checks of the finite identities behind the constructions.
//!
//! Every check returns a [`CheckReport`]. A report that fails carries a
//! witness describing the first offending input.

mod arith;
mod cases;
mod lemma;
mod maps;
mod real_tail;
mod realize;
mod shells;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::number_theory::DEFAULT_PRIME_CAP;
use crate::rational::{self, Rational};

pub use arith::arithmetic_identities;
pub use cases::case_identity_checks;
pub use cases::centre_orbit;
pub use lemma::{count_a_pair, count_a_suite, lemma_haynes_check, lemma_haynes_suite, CountPair};
pub use maps::{
    iota_pushforward_check, random_class_balls, tau1, tau2_ball, tau2_measure_check, tau_ball_image_check,
    unit_inversion_check,
};
pub use real_tail::{real_case_tail, real_tail_diagnostic, RealTail};
pub use realize::{theorem1_realization, theorem2_realization, THEOREM2_TARGETS};
pub use shells::{
    builtin_rules, shell_report, subadditivity_check, zero_full_diagnostic, BuiltinRule, ShellEntry, ShellReport,
    ZeroFullRow,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Value,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub quantities: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn new(name: &str, params: Value) -> Self {
        CheckReport { name: name.to_string(), params, passed: true, witness: None, quantities: BTreeMap::new() }
    }

    pub fn quantity(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.quantities.insert(key.to_string(), value.to_string());
        self
    }

    pub fn rational(&mut self, key: &str, value: &Rational) -> &mut Self {
        self.quantity(key, rational::to_fraction(value))
    }

    /// Marks the report failed. Only the first witness is kept.
    pub fn fail(&mut self, witness: Value) -> &mut Self {
        self.passed = false;
        self.witness.get_or_insert(witness);
        self
    }

    /// Fails with `witness` unless `ok`.
    pub fn expect(&mut self, ok: bool, witness: impl FnOnce() -> Value) -> &mut Self {
        if !ok {
            self.fail(witness());
        }
        self
    }

    pub fn finish(&mut self) -> CheckReport {
        std::mem::replace(self, CheckReport::new("", Value::Null))
    }
}

/// Sizes for the exhaustive suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub lemma_max_n: u64,
    pub moebius_max_n: u64,
    pub arith_max_n: u64,
    pub depth: u32,
    pub prime_cap: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            lemma_max_n: 200,
            moebius_max_n: 500,
            arith_max_n: 10_000,
            depth: 6,
            prime_cap: DEFAULT_PRIME_CAP,
            seed: 2024,
        }
    }
}

/// Check names accepted by [`run_check`], in report order.
pub const CHECK_NAMES: &[&str] = &[
    "arithmetic",
    "case-identities",
    "iota",
    "lemma-haynes",
    "moebius-count",
    "real-tail",
    "tau",
    "theorem1",
    "theorem2",
    "unit-inversion",
    "zero-full",
];

const SMALL_PRIMES: [u64; 4] = [2, 3, 5, 7];

pub fn run_check(name: &str, config: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let reports = match name {
        "arithmetic" => vec![arithmetic_identities(config.arith_max_n)?],
        "case-identities" => THEOREM2_TARGETS
            .iter()
            .map(|&(p, num, den)| {
                let tables = crate::constructions::theorem2_tables(p, &rational::ratio(num, den), config.depth)?;
                Ok(case_identity_checks(&tables))
            })
            .collect::<Result<_>>()?,
        "iota" => SMALL_PRIMES
            .iter()
            .map(|&p| iota_pushforward_check(p, &random_class_balls(p, 100, 8, config.seed)))
            .collect::<Result<_>>()?,
        "lemma-haynes" => vec![lemma_haynes_suite(config.lemma_max_n, &[2, 3, 5])?],
        "moebius-count" => vec![count_a_suite(config.moebius_max_n, &[2, 3, 5], 3)?],
        "real-tail" => {
            let mut out = Vec::new();
            for x in [rational::int(0), rational::ratio(1, 2), rational::int(1)] {
                out.push(real_tail_diagnostic(&x, &[2, 10, 100])?);
            }
            out
        }
        "tau" => {
            let mut out = Vec::new();
            for &p in &SMALL_PRIMES {
                out.push(tau_ball_image_check(p, 6)?);
                out.push(tau2_measure_check(p, 50, config.seed)?);
            }
            out
        }
        "theorem1" => {
            let mut out = Vec::new();
            for p in [2u64, 3, 5, 7, 13] {
                for len in 1..=3u32 {
                    for bits in 0..(1u32 << len) {
                        let digits = (0..len).map(|k| (bits >> k) & 1).collect();
                        out.push(theorem1_realization(p, digits, 10)?);
                    }
                }
            }
            out
        }
        "theorem2" => THEOREM2_TARGETS
            .iter()
            .map(|&(p, num, den)| theorem2_realization(p, &rational::ratio(num, den), config.depth, config.prime_cap))
            .collect::<Result<_>>()?,
        "unit-inversion" => SMALL_PRIMES.iter().map(|&p| unit_inversion_check(p, 5)).collect::<Result<_>>()?,
        "zero-full" => {
            let rules = builtin_rules(config.depth, config.prime_cap)?;
            vec![zero_full_diagnostic(&rules, 4)?]
        }
        other => return Err(Error::InvalidInput(format!("unknown check {other:?}"))),
    };
    Ok(reports)
}
