//! Dense polynomials over `Z_p`, coefficients stored lowest degree first.

use crate::ring::prime::{mod_inverse, mul_mod};

pub type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a non-zero `f`.
pub fn rem(a: &[u64], f: &[u64], p: u64) -> Poly {
    let df = degree(f).expect("division by the zero polynomial");
    let lead_inv = mod_inverse(f[df] as i128, p).expect("leading coefficient is a unit") as u64;
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - df;
        for (i, &fi) in f[..=df].iter().enumerate() {
            let t = mul_mod(c, fi, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn pow_mod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        b = rem(&mul(&b, &b, p), f, p);
        exp >>= 1;
    }
    acc
}

/// Ben-Or irreducibility test for a monic `f` of degree >= 1:
/// `f` is irreducible iff `gcd(x^(p^i) - x, f) = 1` for every `1 <= i <= deg/2`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let Some(d) = degree(f) else { return false };
    if d == 0 {
        return false;
    }
    let x: Poly = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = pow_mod(&h, p, f, p);
        let g = gcd(&sub(&h, &x, p), f, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Lowest-degree-first coefficients of the monic polynomial of degree `e`
/// whose non-leading coefficients are the base-`p` digits of `index`.
/// Increasing `index` walks monic polynomials in lexicographic order with the
/// `x^(e-1)` coefficient most significant.
pub fn monic_from_index(mut index: u128, p: u64, e: usize) -> Poly {
    let mut f = Vec::with_capacity(e + 1);
    for _ in 0..e {
        f.push((index % p as u128) as u64);
        index /= p as u128;
    }
    f.push(1);
    f
}

/// First irreducible monic polynomial of degree `e` over `Z_p` in
/// lexicographic coefficient order.
pub fn first_irreducible(p: u64, e: usize) -> Poly {
    let count = (p as u128).pow(e as u32);
    (0..count)
        .map(|i| monic_from_index(i, p, e))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}
