use num_traits::Zero;
use serde_json::json;

use super::CheckReport;
use crate::ball_set::BallSet;
use crate::constructions::{
    spectrum_value, theorem1_psi, theorem1_stage_indices, theorem2_psi, theorem2_tables, SpectrumDigits,
};
use crate::ds_sets::{insert_stage, set_c_n, FamilyTag};
use crate::error::Result;
use crate::number_theory::valuation_u64;
use crate::rational::{self, Rational};

/// `(p, numerator, denominator)` of the standard split-rule targets, one or
/// more per case.
pub const THEOREM2_TARGETS: &[(u64, i64, i64)] =
    &[(2, 1, 4), (2, 3, 8), (3, 1, 3), (3, 5, 9), (5, 2, 5), (7, 3, 7), (13, 4, 13)];

fn classes_json(set: &BallSet) -> String {
    set.classes().iter().map(|(c, d)| format!("{c}+{}^{d}", set.p())).collect::<Vec<_>>().join(",")
}

/// The shell rule for `digits` on `count` primes per shell: each stage set
/// covers its shell and the union has measure `sum x_k (p-1) p^{-k-1}`.
pub fn theorem1_realization(p: u64, digits: Vec<u32>, count: usize) -> Result<CheckReport> {
    let label: String = digits.iter().map(|d| d.to_string()).collect();
    let mut report = CheckReport::new("theorem1", json!({ "p": p, "digits": label, "primes": count }));
    let digits = SpectrumDigits::binary(p, digits)?;
    let expected = spectrum_value(&digits, FamilyTag::C)?;
    let rule = theorem1_psi(p, digits)?;
    let mut union = BallSet::new(p);
    let stages = theorem1_stage_indices(&rule, count);
    for &n in &stages {
        let psi = rule.eval(n);
        let k = valuation_u64(p, n);
        let set = set_c_n(p, n, &psi)?;
        report.expect(set.contains_shell(k), || json!({ "n": n, "shell": k }));
        union = union.union(&set)?;
    }
    report.quantity("stages", stages.len());
    report.rational("measure", &union.measure()).rational("expected", &expected);
    report.expect(union.measure() == expected, || json!({ "measure": rational::to_fraction(&union.measure()) }));
    Ok(report.finish())
}

/// The split rule for `x` cut at `depth`, one witness prime per class: the
/// union of the unitary stage sets has exactly the predicted measure, which
/// lies within the truncation bound below `x`.
pub fn theorem2_realization(p: u64, x: &Rational, depth: u32, prime_cap: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        "theorem2",
        json!({ "p": p, "x": rational::to_fraction(x), "depth": depth, "prime_cap": prime_cap }),
    );
    let tables = theorem2_tables(p, x, depth)?;
    let witnesses = tables.witnesses(prime_cap)?;
    let predicted = tables.predicted_measure();
    let bound = tables.truncation_bound();
    let rule = theorem2_psi(tables, prime_cap);
    let mut union = BallSet::new(p);
    for w in &witnesses {
        report.expect(rule.eval(w.n) == w.psi, || json!({ "n": w.n, "part": w.part.to_string() }));
        insert_stage(&mut union, FamilyTag::FrakA, w.n, &w.psi)?;
    }
    let measure = union.measure();
    let gap = x - &measure;
    report
        .quantity("witnesses", witnesses.len())
        .quantity("largest_witness", witnesses.iter().map(|w| w.n).max().unwrap_or(0))
        .rational("measure", &measure)
        .rational("predicted", &predicted)
        .rational("gap", &gap)
        .rational("gap_bound", &bound);
    if union.classes().len() <= 16 {
        report.quantity("classes", classes_json(&union));
    }
    report.expect(measure == predicted, || json!({ "measure": rational::to_fraction(&measure) }));
    report.expect(!(gap < Rational::zero()) && gap <= bound, || json!({ "gap": rational::to_fraction(&gap) }));
    Ok(report.finish())
}
