//! Integer arithmetic on desk-scale inputs: factorization, arithmetic
//! functions, primitive roots and primes in residue classes.

use crate::error::{Error, Result};

/// Default upper bound for [`dirichlet_prime`] searches.
pub const DEFAULT_PRIME_CAP: u64 = 100_000_000;

/// Prime factorization as `(prime, exponent)` pairs with increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(q, _)| q)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(q, e)| q.pow(e)).product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(q, e) in &self.0 {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= q;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The `2^omega` unitary divisors `d` (those with `gcd(d, n/d) = 1`), in
    /// the order of the binary assignments over the prime list.
    pub fn unitary_divisors(&self) -> Vec<u64> {
        let blocks: Vec<u64> = self.0.iter().map(|&(q, e)| q.pow(e)).collect();
        (0..1u64 << blocks.len())
            .map(|mask| blocks.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, b)| b).product())
            .collect()
    }
}

/// Exact factorization by trial division.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    let mut n = n;
    let mut out = Vec::new();
    let mut push = |q: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(q) {
            *n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    // 6k +- 1 wheel
    let mut q = 5u64;
    while q.saturating_mul(q) <= n {
        push(q, &mut n);
        push(q + 2, &mut n);
        q += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(Factorization(out))
}

/// Euler totient, Moebius value and number of distinct prime factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithFunctions {
    pub phi: u64,
    pub mu: i8,
    pub omega: u32,
}

pub fn arith_functions(n: u64) -> Result<ArithFunctions> {
    let f = factorize(n)?;
    let phi = f.pairs().iter().map(|&(q, e)| (q - 1) * q.pow(e - 1)).product();
    let mu = if f.pairs().iter().any(|&(_, e)| e > 1) {
        0
    } else if f.omega() % 2 == 0 {
        1
    } else {
        -1
    };
    Ok(ArithFunctions { phi, mu, omega: f.omega() })
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: i128, m: u64) -> Option<u64> {
    let m = m as i128;
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m) as u64)
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut q = n.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// All primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Multiplicative order of `g` modulo the prime `p`, given the factorization
/// of `p - 1`.
fn has_full_order(g: u64, p: u64, group: &Factorization) -> bool {
    group.primes().all(|q| pow_mod(g, (p - 1) / q, p) != 1)
}

/// Smallest `g >= 2` generating `(Z/pZ)^x` for an odd prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let group = factorize(p - 1)?;
    (2..p)
        .find(|&g| has_full_order(g, p, &group))
        .ok_or_else(|| Error::InvalidInput(format!("no primitive root found for {p}")))
}

/// The `index`-th prime (1-based, increasing) congruent to `a` mod `b` and
/// not exceeding `cap`.
pub fn dirichlet_prime(a: i64, b: u64, index: usize, cap: u64) -> Result<u64> {
    if b == 0 || index == 0 {
        return Err(Error::InvalidInput("modulus and index must be positive".into()));
    }
    let r = a.rem_euclid(b as i64) as u64;
    if gcd(r, b) != 1 {
        return Err(Error::InvalidInput(format!("gcd({a}, {b}) > 1")));
    }
    let mut seen = 0;
    let mut q = r;
    while q <= cap {
        if is_prime(q) {
            seen += 1;
            if seen == index {
                return Ok(q);
            }
        }
        q = match q.checked_add(b) {
            Some(next) => next,
            None => break,
        };
    }
    Err(Error::SearchCapExceeded { residue: r, modulus: b, index, cap })
}

/// `#{a : |a| <= limit, a = c mod m, no prime of `primes` divides a}` by
/// inclusion-exclusion over squarefree products of `primes`. Every prime must
/// be coprime to `m`.
pub fn count_coprime_in_progression(primes: &[u64], limit: u64, c: u64, m: u64) -> i128 {
    debug_assert!(primes.iter().all(|&q| gcd(q, m) == 1));
    let m_i = m as i128;
    let mut total = 0i128;
    for mask in 0u64..1 << primes.len() {
        let mut d = 1u128;
        let mut sign = 1i128;
        for (j, &q) in primes.iter().enumerate() {
            if mask >> j & 1 == 1 {
                d *= q as u128;
                sign = -sign;
            }
        }
        if d > limit as u128 {
            // only l = 0 survives, and it lies in the class iff c = 0 mod m
            if c.is_multiple_of(m) {
                total += sign;
            }
            continue;
        }
        let l = (limit as u128 / d) as i128;
        let x = if m == 1 {
            0
        } else {
            let dinv = inv_mod((d % m as u128) as i128, m).expect("coprime to m") as i128;
            (c as i128 % m_i) * dinv % m_i
        };
        let upto = |t: i128| (t - x).div_euclid(m_i);
        total += sign * (upto(l) - upto(-l - 1));
    }
    total
}

/// `nu_p(n)` for a nonzero integer.
pub fn valuation_u64(p: u64, mut n: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn brute_order(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().pairs().is_empty());
        assert!(brute_is_prime(9973));
        assert_eq!(factorize(9973).unwrap().pairs(), &[(9973, 1)]);
        assert!(factorize(0).is_err());
        for n in 1..3000u64 {
            assert_eq!(factorize(n).unwrap().value(), n);
        }
    }

    #[test]
    fn arith_examples() {
        assert_eq!(arith_functions(12).unwrap(), ArithFunctions { phi: 4, mu: 0, omega: 2 });
        assert_eq!(arith_functions(30).unwrap(), ArithFunctions { phi: 8, mu: -1, omega: 3 });
        assert_eq!(arith_functions(1).unwrap(), ArithFunctions { phi: 1, mu: 1, omega: 0 });
    }

    #[test]
    fn divisor_lists() {
        let f = factorize(12).unwrap();
        assert_eq!(f.divisors(), vec![1, 2, 3, 4, 6, 12]);
        let mut u = f.unitary_divisors();
        u.sort_unstable();
        assert_eq!(u, vec![1, 3, 4, 12]);
        assert_eq!(factorize(1).unwrap().unitary_divisors(), vec![1]);
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000 {
            assert_eq!(is_prime(n), brute_is_prime(n), "{n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(next_prime(100), 101);
        assert_eq!(next_prime(0), 2);
    }

    #[test]
    fn primitive_roots_by_order() {
        for (p, expected) in [(7, 3), (13, 2), (11, 2)] {
            let brute = (2..p).find(|&g| brute_order(g, p) == p - 1).unwrap();
            assert_eq!(brute, expected);
            assert_eq!(primitive_root(p).unwrap(), expected);
        }
        for p in primes_up_to(400).into_iter().skip(1) {
            let g = primitive_root(p).unwrap();
            assert_eq!(brute_order(g, p), p - 1);
            assert!((2..g).all(|h| brute_order(h, p) != p - 1));
        }
        assert!(primitive_root(2).is_err());
        assert!(primitive_root(9).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_prime(5, 8, 1, 1_000_000).unwrap(), 5);
        assert_eq!(dirichlet_prime(1, 13, 1, 1_000_000).unwrap(), 53);
        assert_eq!(dirichlet_prime(1, 1, 1, 1_000_000).unwrap(), 2);
        assert_eq!(dirichlet_prime(5, 8, 2, 1_000_000).unwrap(), 13);
        assert_eq!(dirichlet_prime(-1, 4, 1, 100).unwrap(), 3);
        assert!(matches!(dirichlet_prime(1, 13, 1, 50), Err(Error::SearchCapExceeded { .. })));
        assert!(dirichlet_prime(2, 4, 1, 100).is_err());
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(inv_mod(2, 9), Some(5));
        assert_eq!(inv_mod(-3, 25), Some(8));
        assert_eq!(inv_mod(3, 9), None);
    }
    #[test]
    fn progression_count_matches_enumeration() {
        for n in 1..120u64 {
            let f = factorize(n).unwrap();
            for m in [1u64, 2, 3, 4, 9, 25] {
                let primes: Vec<u64> = f.primes().filter(|&q| gcd(q, m) == 1).collect();
                let limit = n.saturating_sub(1);
                for c in 0..m {
                    let brute = (-(limit as i64)..=limit as i64)
                        .filter(|a| a.rem_euclid(m as i64) as u64 == c)
                        .filter(|a| primes.iter().all(|&q| a % q as i64 != 0))
                        .count() as i128;
                    assert_eq!(count_coprime_in_progression(&primes, limit, c, m), brute, "{n} {m} {c}");
                }
            }
        }
    }
}
