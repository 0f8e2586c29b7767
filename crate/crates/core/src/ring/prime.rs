//! Primes, modular inverses and multiplicative generators for `Z_p`.

use crate::error::{Error, Result};
use crate::ring::{Arith, Element, RingSpec};

/// Largest modulus accepted for a prime field.
pub const PRIME_LIMIT: u64 = 1 << 61;

/// Deterministic primality by trial division over `6k ± 1`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime `p` with `lo <= p <= hi`.
pub fn find_prime_in(lo: u64, hi: u64) -> Result<u64> {
    if lo < 2 || lo > hi || hi >= PRIME_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "prime search range [{lo}, {hi}] must satisfy 2 <= lo <= hi < 2^61"
        )));
    }
    (lo..=hi).find(|&c| is_prime(c)).ok_or(Error::NoPrimeInRange { lo, hi })
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u128, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`, in `[1, p)`.
///
/// `a` may be any integer; it is reduced first.
pub fn mod_inverse(a: i128, p: u64) -> Result<i128> {
    let m = p as i128;
    let a = a.rem_euclid(m);
    if a == 0 {
        return Err(Error::NotInvertible(a));
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (m, a);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible(a));
    }
    Ok(t0.rem_euclid(m))
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A generator of `Z_p^*` (order `p - 1 >= m`), searching candidates 2, 3, ...
pub fn element_of_order_at_least(spec: &RingSpec, m: u64) -> Result<Element> {
    match spec {
        RingSpec::PrimeField { .. } => primitive_element(spec, m),
        other => Err(Error::InvalidArgument(format!("element_of_order_at_least expects a prime field, got {other}"))),
    }
}

/// A generator of the multiplicative group of a prime or extension field,
/// provided the group order is at least `m`. Candidates follow the canonical
/// element enumeration starting at index 2.
pub fn primitive_element(spec: &RingSpec, m: u64) -> Result<Element> {
    let size = spec.field_size().ok_or_else(|| Error::InvalidArgument(format!("{spec} is not a field")))?;
    let order = size - 1;
    if order < m as u128 {
        return Err(Error::OrderUnavailable { wanted: m, available: order.min(u64::MAX as u128) as u64 });
    }
    if order == 1 {
        return Ok(1);
    }
    let arith = spec.arith();
    let factors = prime_factors(order);
    for idx in 2..size {
        let g = spec.nth_element(idx);
        if factors.iter().all(|&r| arith.pow(g, order / r) != 1) {
            return Ok(g);
        }
    }
    unreachable!("every finite field has a primitive element")
}
