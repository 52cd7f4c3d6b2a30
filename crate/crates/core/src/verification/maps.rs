use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::CheckReport;
use crate::ball_set::BallSet;
use crate::error::{Error, Result};
use crate::padic::{
    digits_of, invert_unit_ball, iota_inverse_ball, mod_inverse_prime_power, p_power, DigitVector, PAdicBall,
};
use crate::rational::{self, int, Rational};

/// `count` classes with depths in `0..=max_depth`, drawn from a seeded stream.
pub fn random_class_balls(p: u64, count: usize, max_depth: u32, seed: u64) -> Vec<PAdicBall> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    (0..count)
        .map(|_| {
            let depth = rng.gen_range(0..=max_depth);
            let residue = rng.gen_range(0..p.pow(depth));
            PAdicBall::class(p, residue, depth)
        })
        .collect()
}

/// Residue of the first `depth` base-`p` digits of a real `x >= 0`, digit
/// `m` taken at `p^-m`.
fn iota_residue(p: u64, x: &Rational, depth: u32) -> BigUint {
    let pb = BigInt::from(p);
    let mut r = BigUint::zero();
    for m in (0..depth).rev() {
        let d = rational::floor(&(x * rational::pow(p, m as i64))).mod_floor(&pb);
        r = r * p + d.to_biguint().expect("digit");
    }
    r
}

/// The interval attached to each ball has length `p mu_p(ball)`, and sample
/// points of the interval read back into the ball.
pub fn iota_pushforward_check(p: u64, balls: &[PAdicBall]) -> Result<CheckReport> {
    let mut report = CheckReport::new("iota", json!({ "p": p, "balls": balls.len() }));
    let samples = [int(0), rational::ratio(1, 3), rational::ratio(1, 2), rational::ratio(98, 99)];
    for ball in balls {
        let (c, depth) = ball.as_class().ok_or(Error::DegenerateBall)?;
        let interval = iota_inverse_ball(ball)?;
        let length = interval.length();
        report.expect(
            length == int(p) * ball.measure(),
            || json!({ "ball": ball.to_string(), "length": rational::to_fraction(&length) }),
        );
        for t in &samples {
            let x = &interval.start + t * &length;
            let back = iota_residue(p, &x, depth);
            report.expect(&back == c, || json!({ "ball": ball.to_string(), "point": rational::to_fraction(&x) }));
        }
        if depth > 0 {
            let back = iota_residue(p, &interval.end, depth);
            report.expect(&back != c, || json!({ "ball": ball.to_string(), "end_maps_inside": true }));
        }
    }
    Ok(report.finish())
}

/// Inversion permutes the unit classes of each depth `1..=max_depth`.
pub fn unit_inversion_check(p: u64, max_depth: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("unit-inversion", json!({ "p": p, "max_depth": max_depth }));
    let mut classes = 0u64;
    for depth in 1..=max_depth {
        let modulus = p.pow(depth);
        let mut images = BTreeSet::new();
        let units: Vec<u64> = (1..modulus).filter(|c| c % p != 0).collect();
        for &c in &units {
            let ball = PAdicBall::class(p, c, depth);
            let image = invert_unit_ball(&ball)?;
            let (r, d) = image.as_class().ok_or(Error::NotAUnitBall)?;
            let r = r.to_u64().expect("below modulus");
            let witness = || json!({ "p": p, "c": c, "depth": depth, "image": r });
            report.expect(d == depth && image.measure() == ball.measure(), witness);
            report.expect((c as u128 * r as u128) % modulus as u128 == 1, witness);
            report.expect(image.contains(&rational::ratio(1, c)), witness);
            report.expect(invert_unit_ball(&image)? == ball, witness);
            images.insert(r);
            classes += 1;
        }
        report.expect(images.len() == units.len(), || json!({ "p": p, "depth": depth, "images": images.len() }));
    }
    report.quantity("classes", classes);
    Ok(report.finish())
}

/// `tau_1` on digit vectors `[b_0, b_1, ...]` of a unit: drop `b_0`, and if
/// `b_1 = 0` put a `1` in its place.
pub fn tau1(b: &DigitVector) -> Result<DigitVector> {
    if b.precision() < 2 {
        return Err(Error::InvalidInput(format!("precision {} is below 2", b.precision())));
    }
    if b.digits[0] == 0 {
        return Err(Error::NotAUnit);
    }
    let mut digits = b.digits[1..].to_vec();
    if digits[0] == 0 {
        digits[0] = 1;
    }
    DigitVector::new(b.p, digits)
}

/// `tau_1` on a residue `b mod p^precision`, giving a residue mod `p^{precision-1}`.
fn tau1_residue(p: u64, b: u64, precision: u32) -> u64 {
    let rest = (b / p) % p.pow(precision - 1);
    if rest.is_multiple_of(p) {
        1 + rest
    } else {
        rest
    }
}

/// `tau_2(p^k b) = p^k / tau_1(b)` applied to a ball `c + p^M Z_p` inside
/// `p^k Z_p^x` with `M >= k + 2`; the image is a ball of depth `M - 1`.
pub fn tau2_ball(k: u32, ball: &PAdicBall) -> Result<PAdicBall> {
    let p = ball.p;
    let (c, depth) = ball.as_class().ok_or(Error::DegenerateBall)?;
    if depth < k + 2 {
        return Err(Error::InvalidInput(format!("depth {depth} is below k + 2 = {}", k + 2)));
    }
    let pk = p_power(p, k);
    let (b, rem) = c.div_rem(&pk);
    if !rem.is_zero() || (&b % p).is_zero() {
        return Err(Error::NotAUnit);
    }
    let precision = depth - k;
    let t = tau1(&DigitVector::new(p, digits_of(p, &b, precision))?)?;
    let inv = mod_inverse_prime_power(&BigInt::from(t.value()), p, precision - 1)?;
    Ok(PAdicBall::class(p, BigInt::from(inv * pk), depth - 1))
}

/// Lifting a unit class of depth `K` one digit and applying `tau_1` yields
/// exactly the residues of one class of depth `K - 1`.
pub fn tau_ball_image_check(p: u64, max_k: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("tau-ball-image", json!({ "p": p, "max_k": max_k }));
    let mut classes = 0u64;
    for big_k in 2..=max_k {
        let modulus = p.pow(big_k);
        let coarse = modulus / p;
        for c in (1..modulus).filter(|c| c % p != 0) {
            let images: BTreeSet<u64> = (0..p).map(|j| tau1_residue(p, c + j * modulus, big_k + 1)).collect();
            let first = *images.iter().next().expect("p lifts");
            report.expect(
                images.len() == p as usize && images.iter().all(|r| r % coarse == first % coarse),
                || json!({ "p": p, "K": big_k, "c": c, "images": images.iter().collect::<Vec<_>>() }),
            );
            classes += 1;
        }
    }
    report.quantity("classes", classes);
    Ok(report.finish())
}

/// `mu_p(tau_2(A)) = p mu_p(A)` for unions `A` of depth `k + 3` classes inside
/// one depth `k + 2` ball of `p^k Z_p^x`.
pub fn tau2_measure_check(p: u64, trials: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("tau2-measure", json!({ "p": p, "trials": trials, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) ^ p);
    for _ in 0..trials {
        let k = rng.gen_range(0..=2u32);
        let b = loop {
            let b = rng.gen_range(1..p * p);
            if b % p != 0 {
                break b;
            }
        };
        let centre = p.pow(k) * b;
        let step = p.pow(k + 2);
        let chosen: Vec<u64> = loop {
            let v: Vec<u64> = (0..p).filter(|_| rng.gen_bool(0.5)).collect();
            if !v.is_empty() {
                break v;
            }
        };
        let mut a = BallSet::new(p);
        let mut image = BallSet::new(p);
        for j in &chosen {
            let child = PAdicBall::class(p, centre + j * step, k + 3);
            a.insert(&child)?;
            image.insert(&tau2_ball(k, &child)?)?;
        }
        report.expect(
            image.measure() == int(p) * a.measure(),
            || json!({ "p": p, "k": k, "b": b, "children": chosen, "image": rational::to_fraction(&image.measure()) }),
        );
    }
    Ok(report.finish())
}
