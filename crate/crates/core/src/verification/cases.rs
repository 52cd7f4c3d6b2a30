use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde_json::json;

use super::CheckReport;
use crate::ball_set::BallSet;
use crate::constructions::{Case2Tables, CaseId};
use crate::number_theory::{self as nt};
use crate::rational::{self, int, ratio, Rational};

/// `[c, -c, c^{-1}, -c^{-1}]` modulo `m`, for `c` prime to `m`.
pub fn centre_orbit(c: u64, m: u64) -> [u64; 4] {
    let c = c % m;
    let inv = nt::inv_mod(c as i128, m).expect("unit");
    let neg = |x: u64| (m - x) % m;
    [c, neg(c), inv, neg(inv)]
}

fn classes_set(p: u64, residues: impl IntoIterator<Item = u64>, depth: u32) -> BallSet {
    BallSet::from_classes(p, residues.into_iter().map(|r| (BigUint::from(r), depth)))
}

/// Expected size of the `I`-orbit union at digit `a`.
fn i_orbit_size(case: CaseId, p: u64, a: u32) -> u64 {
    let a = a as u64;
    if a == p - 1 {
        return p - 1;
    }
    match case {
        CaseId::One => 4 * (a / 4),
        CaseId::Two if a >= 2 => 4 * ((a - 2) / 4) + 2,
        CaseId::Two | CaseId::Three => 0,
        CaseId::Four => 2 * (a / 2),
    }
}

/// Every residue identity the split construction relies on, for the concrete
/// tables: orbit sizes of the centres, the per-case generator identities,
/// the depth-2 inclusion table for `p = 3, 5`, and pairwise disjointness of
/// all balls at each level. Level measures are recomputed with [`BallSet`]
/// and summed against [`Case2Tables::predicted_measure`].
pub fn case_identity_checks(tables: &Case2Tables) -> CheckReport {
    let (p, g, case, depth) = (tables.p, tables.g, tables.case, tables.depth);
    let mut report = CheckReport::new(
        "case-identities",
        json!({ "p": p, "x": rational::to_fraction(&tables.x), "case": case.number(), "g": g, "depth": depth }),
    );

    match case {
        CaseId::One => {
            let j = (p - 1) / 4;
            report.expect(nt::primitive_root(p).ok() == Some(g), || json!({ "generator": g }));
            for i in 1..j {
                let orbit: BTreeSet<u64> = centre_orbit(nt::pow_mod(g, i, p), p).into_iter().collect();
                report.expect(orbit.len() == 4, || json!({ "i": i, "orbit": orbit }));
            }
            let gj = nt::pow_mod(g, j, p);
            let orbit: BTreeSet<u64> = centre_orbit(gj, p).into_iter().collect();
            report.expect(
                orbit.len() == 2 && orbit.contains(&nt::inv_mod(gj as i128, p).unwrap()),
                || json!({ "j": j, "orbit": orbit }),
            );
            let m = classes_set(p, orbit, 1).measure();
            report.expect(m == ratio(2, p), || json!({ "j": j, "measure": rational::to_fraction(&m) }));
        }
        CaseId::Two => {
            report.expect(nt::primitive_root(p).ok() == Some(g), || json!({ "generator": g }));
        }
        CaseId::Three => {
            for i in 1..=depth {
                let m = 1u64 << (i + 1);
                let c = 1 + (1u64 << i);
                report.expect(nt::inv_mod(c as i128, m) == Some(c % m), || json!({ "i": i, "inverse": c }));
            }
        }
        CaseId::Four => {
            let m = p * p;
            for level in &tables.levels {
                for (i, &bi) in (1u32..).zip(&level.b) {
                    for b in 1..=bi as u64 {
                        let c = g + b * p.pow(i);
                        let got = centre_orbit(c % m, m);
                        let a = if i == 1 { b } else { 0 };
                        let want = if p == 3 {
                            [2, 7, 5, 4]
                        } else {
                            [3 + 5 * a, 2 + 5 * (4 - a), 2 + 5 * (3 + a), 3 + 5 * (1 - a)]
                        };
                        report.expect(got == want, || json!({ "k": level.k, "i": i, "b": b, "mod_p2": got }));
                        report.quantity(&format!("k={} i={i} b={b} mod p^2", level.k), format!("{got:?}"));
                    }
                }
            }
        }
    }

    let orbit_size = if case == CaseId::Three { 2 } else { 4 };
    let mut total = Rational::from_integer(0.into());
    for level in &tables.levels {
        let k = level.k;
        let mut union = BallSet::new(p);
        let mut parts_sum = int(0);

        let i_residues: BTreeSet<u64> = level.classes.iter().flat_map(|&m| centre_orbit(m, p)).collect();
        let expected = i_orbit_size(case, p, level.x_k);
        report.expect(
            i_residues.len() as u64 == expected,
            || json!({ "k": k, "I": level.classes, "orbit_union": i_residues }),
        );
        let i_set = classes_set(p, i_residues, 1);
        parts_sum += i_set.measure();
        union = union.union(&i_set).expect("same prime");

        for (i, &bi) in (1u32..).zip(&level.b) {
            let m = p.pow(i + 1);
            for b in 1..=bi as u64 {
                let c = g + b * p.pow(i);
                let orbit: BTreeSet<u64> = centre_orbit(c, m).into_iter().collect();
                let set = classes_set(p, orbit.iter().copied(), i + 1);
                report.expect(
                    orbit.len() == orbit_size && set.measure() == ratio(orbit_size, m),
                    || json!({ "k": k, "i": i, "b": b, "orbit": orbit }),
                );
                let before = union.measure();
                union = union.union(&set).expect("same prime");
                report.expect(
                    union.measure() - before == set.measure(),
                    || json!({ "k": k, "i": i, "b": b, "overlap": orbit, "modulus": m }),
                );
                parts_sum += set.measure();
            }
        }
        report.expect(union.measure() == parts_sum, || json!({ "k": k, "disjoint": false }));
        report.rational(&format!("level {k}"), &union.measure());
        total += union.measure() * rational::pow(p, -(k as i64));
    }
    let predicted = tables.predicted_measure();
    report.rational("measure", &total).rational("predicted", &predicted);
    report.expect(total == predicted, || json!({ "measure": rational::to_fraction(&total) }));
    report.finish()
}
