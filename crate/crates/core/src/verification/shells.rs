use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::realize::THEOREM2_TARGETS;
use super::CheckReport;
use crate::ball_set::BallSet;
use crate::constructions::{theorem1_psi, theorem1_stage_indices, theorem2_tables, PsiRule, SpectrumDigits};
use crate::ds_sets::{insert_stage, tail_union, FamilyTag};
use crate::error::Result;
use crate::number_theory::primes_up_to;
use crate::rational::{self, int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellEntry {
    pub k: u32,
    #[serde(with = "rational::serde_fraction")]
    pub measure: Rational,
}

/// Measures of `set ∩ p^k Z_p^x` for `k <= k_max`, and of `set ∩ p^{k_max+1} Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellReport {
    pub p: u64,
    pub shells: Vec<ShellEntry>,
    #[serde(with = "rational::serde_fraction")]
    pub residual: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub total: Rational,
}

pub fn shell_report(set: &BallSet, k_max: u32) -> Result<ShellReport> {
    let p = set.p();
    let shells: Vec<ShellEntry> = (0..=k_max).map(|k| ShellEntry { k, measure: set.shell_measure(k) }).collect();
    let residual = set.intersect(&BallSet::multiples(p, k_max + 1))?.measure();
    let total = set.measure();
    debug_assert_eq!(shells.iter().map(|s| &s.measure).sum::<Rational>() + &residual, total);
    Ok(ShellReport { p, shells, residual, total })
}

/// A named construction with the stage indices it is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinRule {
    pub label: String,
    pub p: u64,
    pub rule: PsiRule,
    pub stages: Vec<(u64, Rational)>,
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 13];

/// Every built-in construction at a fixed finite stage: the zero rule, the
/// shell rule for all binary digit vectors of length at most 3 (ten primes
/// per shell), the split rule on the standard targets (one witness per
/// class) and the full rule on the primes below 50.
pub fn builtin_rules(depth: u32, prime_cap: u64) -> Result<Vec<BuiltinRule>> {
    let mut out = Vec::new();
    for p in PRIMES {
        out.push(BuiltinRule { label: "zero".into(), p, rule: PsiRule::Zero, stages: vec![] });
        for len in 1..=3u32 {
            for bits in 0..1u32 << len {
                let digits: Vec<u32> = (0..len).map(|k| bits >> k & 1).collect();
                let label = format!("theorem1 digits={}", digits.iter().map(|d| d.to_string()).collect::<String>());
                let rule = theorem1_psi(p, SpectrumDigits::binary(p, digits)?)?;
                let stages = theorem1_stage_indices(&rule, 10).into_iter().map(|n| (n, rule.eval(n))).collect();
                out.push(BuiltinRule { label, p, rule, stages });
            }
        }
        let rule = PsiRule::Theorem2Full { p };
        let stages = primes_up_to(50).into_iter().filter(|&q| q != p).map(|q| (q, int(q))).collect();
        out.push(BuiltinRule { label: "theorem2 x=1".into(), p, rule, stages });
    }
    for &(p, num, den) in THEOREM2_TARGETS.iter() {
        let tables = theorem2_tables(p, &ratio(num, den), depth)?;
        let stages = tables.witnesses(prime_cap)?.into_iter().map(|w| (w.n, w.psi)).collect();
        let rule = crate::constructions::theorem2_psi(tables, prime_cap);
        out.push(BuiltinRule { label: format!("theorem2 x={num}/{den}"), p, rule, stages });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroFullRow {
    pub rule: String,
    pub p: u64,
    pub k: u32,
    #[serde(with = "rational::serde_fraction")]
    pub measure: Rational,
    pub verdict: &'static str,
}

/// Shell measures of the family-`C` stage union for each rule, each `k <= k_max`,
/// classified as `zero`, `full` or `intermediate`.
pub fn zero_full_diagnostic(rules: &[BuiltinRule], k_max: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("zero-full", json!({ "rules": rules.len(), "k_max": k_max }));
    let mut rows = Vec::new();
    for r in rules {
        let mut union = BallSet::new(r.p);
        for (n, v) in &r.stages {
            insert_stage(&mut union, FamilyTag::C, *n, v)?;
        }
        let shells = shell_report(&union, k_max)?;
        for entry in shells.shells {
            let full = (int(r.p - 1)) * rational::pow(r.p, -(entry.k as i64) - 1);
            let verdict = if entry.measure.is_zero() {
                "zero"
            } else if entry.measure == full {
                "full"
            } else {
                "intermediate"
            };
            report.expect(
                verdict != "intermediate",
                || json!({ "rule": r.label, "p": r.p, "k": entry.k, "measure": rational::to_fraction(&entry.measure) }),
            );
            rows.push(ZeroFullRow { rule: r.label.clone(), p: r.p, k: entry.k, measure: entry.measure, verdict });
        }
    }
    let count = |v: &str| rows.iter().filter(|r| r.verdict == v).count();
    report.quantity("zero", count("zero")).quantity("full", count("full"));
    report.quantity("intermediate", count("intermediate"));
    report.quantity("table", serde_json::to_string(&rows).expect("rows serialize"));
    Ok(report.finish())
}

/// `mu_p(union S_n) <= sum mu_p(S_n)` over the support in `[lo, hi]`.
pub fn subadditivity_check(family: FamilyTag, p: u64, psi: &PsiRule, lo: u64, hi: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "subadditivity",
        json!({ "family": family.name(), "p": p, "rule": psi.name(), "range": [lo, hi] }),
    );
    let tail = tail_union(family, p, psi, lo, hi)?;
    report.rational("measure", &tail.measure).rational("series", &tail.series);
    report.expect(tail.measure <= tail.series, || json!({ "measure": rational::to_fraction(&tail.measure) }));
    Ok(report.finish())
}
