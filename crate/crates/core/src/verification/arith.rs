use serde_json::json;

use super::CheckReport;
use crate::error::Result;
use crate::number_theory::{arith_functions, factorize};
use crate::rational::{int, ratio, Rational};

/// Sieved `phi` and `mu` on `0..=n`.
fn sieve(n: usize) -> (Vec<u64>, Vec<i8>) {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for q in 2..=n {
        if composite[q] {
            continue;
        }
        for m in (q..=n).step_by(q) {
            if m > q {
                composite[m] = true;
            }
            phi[m] -= phi[m] / q as u64;
            mu[m] = -mu[m];
        }
        if let Some(q2) = q.checked_mul(q) {
            for m in (q2..=n).step_by(q2) {
                mu[m] = 0;
            }
        }
    }
    (phi, mu)
}

/// The Moebius sum identities and the totient product formula for all
/// `1 <= n <= max_n`, with `phi` and `mu` taken from factorization and
/// compared against a sieve.
pub fn arithmetic_identities(max_n: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("arithmetic", json!({ "max_n": max_n }));
    let (phi, mu) = sieve(max_n as usize);
    let mut checked = 0u64;
    for n in 1..=max_n {
        let f = factorize(n)?;
        let af = arith_functions(n)?;
        let i = n as usize;
        report.expect(
            af.phi == phi[i] && af.mu == mu[i],
            || json!({ "n": n, "identity": "sieve", "phi": af.phi, "mu": af.mu }),
        );
        let divisors = f.divisors();
        let mu_sum: i64 = divisors.iter().map(|&d| mu[d as usize] as i64).sum();
        report.expect(mu_sum == (n == 1) as i64, || json!({ "n": n, "identity": "mu-sum", "value": mu_sum }));
        let phi_sum: i64 = divisors.iter().map(|&d| mu[d as usize] as i64 * (n / d) as i64).sum();
        report.expect(phi_sum == af.phi as i64, || json!({ "n": n, "identity": "phi-sum", "value": phi_sum }));
        let product: Rational = f.primes().map(|q| int(1) - ratio(1, q)).product();
        report.expect(product == ratio(af.phi, n), || json!({ "n": n, "identity": "product" }));
        checked += 1;
    }
    report.quantity("checked", checked);
    Ok(report.finish())
}
