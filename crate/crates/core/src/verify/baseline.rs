//! Exact multiplication, MPS and the prior-work verifiers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::bits::{bits_for, BitSource};
use super::{first_nonzero, residual, timed, Instance, RunStats, Side, Verdict, Witness};
use crate::error::{Error, Result};
use crate::matrix::{matmul, nnz, Matrix, INT_LIMIT};
use crate::reduce::mmv_to_allzeroes;
use crate::ring::{find_prime_in, primitive_element, Arith, Element, RingSpec};

/// Default size cap for [`verify_korec_wiedermann`].
pub const KW_DEFAULT_CAP: usize = 256;

fn cube(n: usize) -> u64 {
    (n as u64).pow(3)
}

fn sq(n: usize) -> u64 {
    (n as u64).pow(2)
}

fn require_int(inst: &Instance, name: &str) -> Result<u64> {
    inst.ring.int_bound().ok_or_else(|| Error::InvalidArgument(format!("{name} needs an int ring, got {}", inst.ring)))
}

/// Computes `AB` and compares it with `C` entry by entry.
pub fn verify_exact(inst: &Instance) -> Result<Verdict> {
    timed(|| {
        let ab = matmul(&inst.a, &inst.b)?;
        let stats = RunStats { elem_ops: cube(inst.n()), ..Default::default() };
        let n = inst.n();
        match ab.data().iter().zip(inst.c.data()).position(|(x, y)| x != y) {
            Some(k) => Ok(Verdict::reject(Witness::Entry { row: k / n, col: k % n }, stats)),
            None => Ok(Verdict::equal(stats)),
        }
    })
}

/// Whether `||AB||_0 <= r`.
pub fn mps_decide(a: &Matrix, b: &Matrix, r: u64) -> Result<bool> {
    Ok(nnz(&matmul(a, b)?).nnz as u64 <= r)
}

/// MMV through the zero-product test: `AB = C` iff `||A'B'||_0 <= 0` for
/// the AllZeroes instance `(A', B')`.
pub fn verify_mps(inst: &Instance) -> Result<Verdict> {
    timed(|| {
        let reduced = mmv_to_allzeroes(inst)?.output;
        let prod = matmul(&reduced.a, &reduced.b)?;
        let stats = RunStats { elem_ops: cube(reduced.n()), ..Default::default() };
        if nnz(&prod).nnz == 0 {
            return Ok(Verdict::equal(stats));
        }
        // A'B' = [[AB - C, 0], [0, 0]]
        let m = prod.cols();
        let k = first_nonzero(prod.data()).expect("non-zero product");
        Ok(Verdict::reject(Witness::Entry { row: k / m, col: k % m }, stats))
    })
}

/// Freivalds: `rounds` independent vectors `x` from `{0,1}^n`.
pub fn verify_freivalds(inst: &Instance, rounds: u32, src: &mut BitSource) -> Result<Verdict> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    timed(|| {
        let n = inst.n();
        let start = src.bits_consumed();
        let mut stats = RunStats::default();
        for _ in 0..rounds {
            let x: Vec<Element> = (0..n).map(|_| src.next_bit() as Element).collect();
            let r = residual(&inst.a, &inst.b, &inst.c, &x, Side::Direct)?;
            stats.elem_ops += 3 * sq(n);
            stats.random_bits = src.bits_consumed() - start;
            if let Some(index) = first_nonzero(&r) {
                let w = Witness::TestVector { vector: x, index, side: Side::Direct, ring: inst.ring.clone() };
                return Ok(Verdict::reject(w, stats));
            }
        }
        Ok(Verdict::equal(stats))
    })
}

/// Kimbrel-Sinha: `v = (1, a, ..., a^(n-1))` for random `a` in `{1..2n}`,
/// tested modulo a prime `2n <= q <= 4n`.
pub fn verify_kimbrel_sinha(inst: &Instance, src: &mut BitSource) -> Result<Verdict> {
    require_int(inst, "kimbrel-sinha")?;
    timed(|| {
        let n = inst.n();
        let q = find_prime_in(2 * n as u64, 4 * n as u64)?;
        let ring = RingSpec::zmod(q)?;
        let d = ring.arith();
        let start = src.bits_consumed();
        let range = 2 * n as u64;
        let bits = bits_for(range);
        let alpha = loop {
            let v = src.next_bits(bits);
            if v < range {
                break v as Element + 1;
            }
        };
        let alpha = d.from_int(alpha);
        let mut v = Vec::with_capacity(n);
        let mut pow = 1;
        for _ in 0..n {
            v.push(pow);
            pow = d.mul(pow, alpha);
        }
        let (a, b, c) = (inst.a.cast(&ring)?, inst.b.cast(&ring)?, inst.c.cast(&ring)?);
        let r = residual(&a, &b, &c, &v, Side::Direct)?;
        let stats =
            RunStats { random_bits: src.bits_consumed() - start, elem_ops: 3 * sq(n) + n as u64, wall_nanos: 0 };
        match first_nonzero(&r) {
            Some(index) => {
                Ok(Verdict::reject(Witness::TestVector { vector: v, index, side: Side::Direct, ring }, stats))
            }
            None => Ok(Verdict::equal(stats)),
        }
    })
}

fn big_dot(row: &[Element], v: &[BigInt]) -> BigInt {
    row.iter().zip(v).filter(|(&x, _)| x != 0).map(|(&x, y)| y * BigInt::from(x)).sum()
}

/// Korec-Wiedermann: evaluate every row polynomial of `AB - C` at one
/// integer `alpha` beyond Cauchy's root bound, in exact arithmetic.
///
/// Entries of `AB - C` are at most `n mu^2 + mu` in magnitude, so
/// `alpha = n mu^2 + mu + 1` exceeds every root of every non-zero row
/// polynomial.
pub fn verify_korec_wiedermann(inst: &Instance, cap: usize) -> Result<Verdict> {
    require_int(inst, "korec-wiedermann")?;
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the korec-wiedermann cap {cap}")));
    }
    timed(|| {
        let mu = inst.a.max_abs().max(inst.b.max_abs()).max(inst.c.max_abs());
        let alpha = BigInt::from(n) * BigInt::from(mu) * BigInt::from(mu) + BigInt::from(mu) + BigInt::one();
        let mut v = Vec::with_capacity(n);
        let mut pow = BigInt::one();
        for _ in 0..n {
            v.push(pow.clone());
            pow *= &alpha;
        }
        let bv: Vec<BigInt> = (0..n).map(|i| big_dot(inst.b.row(i), &v)).collect();
        let stats = RunStats { elem_ops: 3 * sq(n), ..Default::default() };
        for i in 0..n {
            let diff = big_dot(inst.a.row(i), &bv) - big_dot(inst.c.row(i), &v);
            if !diff.is_zero() {
                // row i of AB - C is non-zero; locate an entry
                let col = (0..n)
                    .find(|&j| super::difference_entry(inst, i, j).is_ok_and(|x| x != 0))
                    .expect("non-zero row polynomial has a non-zero coefficient");
                return Ok(Verdict::reject(Witness::Entry { row: i, col }, stats));
            }
        }
        Ok(Verdict::equal(stats))
    })
}

/// The ring [`verify_geometric`] evaluates in: the field itself, or for
/// integer instances `Z_q` with `q > max(n^2, 2(nM^2 + M))`.
pub fn geometric_check_ring(ring: &RingSpec, n: usize) -> Result<RingSpec> {
    let n2 = (n as u128) * (n as u128);
    match ring {
        RingSpec::Int { bound } => {
            let m = *bound as u128;
            let diff_bound = m
                .checked_mul(m)
                .and_then(|x| x.checked_mul(n as u128))
                .and_then(|x| x.checked_add(m))
                .and_then(|x| x.checked_mul(2))
                .filter(|&x| x < INT_LIMIT)
                .ok_or_else(|| Error::MagnitudeOverflow(format!("2(nM^2 + M) for n = {n}, M = {m}")))?;
            let lo = n2.max(diff_bound) + 1;
            if lo >= 1 << 60 {
                return Err(Error::MagnitudeOverflow(format!(
                    "geometric modulus above {lo} exceeds the supported prime range"
                )));
            }
            let lo = (lo as u64).max(2);
            RingSpec::zmod(find_prime_in(lo, 2 * lo)?)
        }
        field => {
            let size = field.field_size().expect("field");
            if size <= n2 {
                return Err(Error::FieldTooSmall(format!("{field} has {size} elements, need more than n^2 = {n2}")));
            }
            Ok(field.clone())
        }
    }
}

/// Geometric-progression zero test: with `alpha` of order at least `n^2`,
/// check `g(alpha^i) = 0` for `i < t`, where
/// `g(z) = sum_{i,j} (AB - C)[i][j] z^(i + nj)`. Exact whenever
/// `||AB - C||_0 <= t`.
pub fn verify_geometric(inst: &Instance, t: u64) -> Result<Verdict> {
    if t == 0 {
        return Err(Error::InvalidArgument("geometric needs t >= 1".into()));
    }
    timed(|| {
        let n = inst.n();
        let ring = geometric_check_ring(&inst.ring, n)?;
        let d = ring.arith();
        let alpha = primitive_element(&ring, sq(n))?;
        let (a, b, c) = (inst.a.cast(&ring)?, inst.b.cast(&ring)?, inst.c.cast(&ring)?);
        let points = t.min(sq(n).max(1));
        let powers = |base: Element| {
            let mut out = Vec::with_capacity(n);
            let mut p = 1;
            for _ in 0..n {
                out.push(p);
                p = d.mul(p, base);
            }
            out
        };
        let mut stats = RunStats::default();
        let mut beta = 1;
        for _ in 0..points {
            let x = powers(beta);
            let y = powers(d.pow(beta, n as u128));
            let r = residual(&a, &b, &c, &y, Side::Direct)?;
            let g = x.iter().zip(&r).fold(0, |acc, (&xi, &ri)| d.mul_add(acc, xi, ri));
            stats.elem_ops += 3 * sq(n) + 3 * n as u64;
            if g != 0 {
                let index = first_nonzero(&r).expect("g != 0 implies a non-zero residual");
                let w = Witness::TestVector { vector: y, index, side: Side::Direct, ring: ring.clone() };
                return Ok(Verdict::reject(w, stats));
            }
            beta = d.mul(beta, alpha);
        }
        Ok(Verdict::equal(stats))
    })
}
