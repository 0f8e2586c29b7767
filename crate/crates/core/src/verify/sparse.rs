//! Verifiers for instances whose difference `AB - C` is promised sparse.
//!
//! If `0 < ||AB - C||_0 <= t`, some row or column of `AB - C` is non-zero
//! with at most `sqrt(t)` non-zeros. A parity check of an MDS code with
//! `ceil(sqrt(t))` rows cannot annihilate such a line, and neither can most
//! columns of a Cauchy matrix.

use std::borrow::Cow;

use super::bits::BitSource;
use super::{
    entry_bound, first_nonzero, residual, residual_bounded, timed, Instance, RunStats, Side, Verdict, Witness,
};
use crate::codes::{cauchy_column, vandermonde_parity_check};
use crate::error::{Error, Result};
use crate::matrix::{isqrt, matmul_bounded, Matrix, INT_LIMIT};
use crate::ring::{build_extension, find_prime_in, Arith, Element, RingSpec};

fn ceil_sqrt(t: u64) -> u64 {
    let r = isqrt(t);
    if r * r == t {
        r
    } else {
        r + 1
    }
}

fn check_t(t: u64, n: usize) -> Result<()> {
    let n2 = (n as u64) * (n as u64);
    if t > n2 {
        return Err(Error::InvalidArgument(format!("t = {t} exceeds n^2 = {n2}")));
    }
    Ok(())
}

/// Field of size at least `min` containing `ring`, lifting a prime field
/// to an extension when needed.
fn lift(ring: &RingSpec, min: u128) -> Result<RingSpec> {
    let size = ring.field_size().expect("field");
    if size >= min {
        return Ok(ring.clone());
    }
    match ring {
        RingSpec::PrimeField { p } => build_extension(*p, min),
        _ => Err(Error::FieldTooSmall(format!("{ring} has {size} elements, need {min}; only prime fields are lifted"))),
    }
}

/// `(points field, computation ring)` for [`verify_det_sparse`]: integer
/// instances take parity-check points in `Z_p`, `n <= p <= 2n`, and compute
/// over the integers; fields compute in a field with at least `n` elements.
pub fn det_sparse_rings(ring: &RingSpec, n: usize) -> Result<(RingSpec, RingSpec)> {
    match ring {
        RingSpec::Int { .. } => {
            let lo = (n as u64).max(2);
            Ok((RingSpec::zmod(find_prime_in(lo, 2 * lo)?)?, ring.clone()))
        }
        field => {
            let f = lift(field, n as u128)?;
            Ok((f.clone(), f))
        }
    }
}

/// `(points field, computation ring)` for [`verify_rand_sparse`] with `k`
/// Cauchy columns.
pub fn rand_sparse_field(ring: &RingSpec, n: usize, k: u64) -> Result<(RingSpec, RingSpec)> {
    let need = n as u64 + k;
    match ring {
        RingSpec::Int { .. } => Ok((RingSpec::zmod(find_prime_in(need.max(2), 2 * need.max(2))?)?, ring.clone())),
        field => {
            let f = lift(field, need as u128)?;
            Ok((f.clone(), f))
        }
    }
}

/// The parity check as a matrix over the computation ring (integer
/// instances read the residues as small non-negative integers).
pub fn parity_rows_for(points: &RingSpec, compute: &RingSpec, rows: usize, n: usize) -> Result<Matrix> {
    let h = vandermonde_parity_check(points, rows, n)?.h;
    Ok(Matrix::from_raw(compute, rows, n, h.data().to_vec()))
}

/// `n * 2n * (n M^2 + M) < 2^126`.
fn int_admissible(ring: &RingSpec, n: usize) -> Result<()> {
    let Some(m) = ring.int_bound() else { return Ok(()) };
    let (n, m) = (n as u128, m as u128);
    let ok = m
        .checked_mul(m)
        .and_then(|x| x.checked_mul(n))
        .and_then(|x| x.checked_add(m))
        .and_then(|x| x.checked_mul(2 * n * n))
        .is_some_and(|x| x < INT_LIMIT);
    if !ok {
        return Err(Error::MagnitudeOverflow(format!("n = {n}, M = {m} fails n*2n*(nM^2+M) < 2^126")));
    }
    Ok(())
}

fn cast_all<'a>(inst: &'a Instance, ring: &RingSpec) -> Result<(Cow<'a, Matrix>, Cow<'a, Matrix>, Cow<'a, Matrix>)> {
    let cast = |m: &'a Matrix| -> Result<Cow<'a, Matrix>> {
        if m.ring() == ring {
            Ok(Cow::Borrowed(m))
        } else {
            m.cast(ring).map(Cow::Owned)
        }
    };
    Ok((cast(&inst.a)?, cast(&inst.b)?, cast(&inst.c)?))
}

/// Deterministic sparse verifier: with `H` the `ceil(sqrt t) x n` parity
/// check, accept iff `((HA)B) - HC = 0` and `(A(BH^T)) - CH^T = 0`, the
/// latter being `H(AB - C)^T = 0` transposed. Exact whenever
/// `||AB - C||_0 <= t`.
pub fn verify_det_sparse(inst: &Instance, t: u64) -> Result<Verdict> {
    let n = inst.n();
    check_t(t, n)?;
    int_admissible(&inst.ring, n)?;
    timed(|| {
        let rows = ceil_sqrt(t).clamp(1, n as u64) as usize;
        let (points, compute) = det_sparse_rings(&inst.ring, n)?;
        let h = parity_rows_for(&points, &compute, rows, n)?;
        let (a, b, c) = cast_all(inst, &compute)?;
        let stats = RunStats { elem_ops: 6 * (rows * n * n) as u64, ..Default::default() };
        let m = entry_bound(&compute);
        let (h_max, a_max, b_max, c_max) = (h.max_abs(), m, m, m);
        let nn = n as u128;

        let ha = matmul_bounded(&h, &a, h_max, a_max)?;
        let direct = matmul_bounded(&ha, &b, nn * h_max * a_max, b_max)?.sub(&matmul_bounded(&h, &c, h_max, c_max)?)?;
        if let Some(k) = first_nonzero(direct.data()) {
            return Ok(Verdict::reject(Witness::ParityRow { side: Side::Direct, row: k / n, col: k % n }, stats));
        }
        let ht = h.transpose();
        let bh = matmul_bounded(&b, &ht, b_max, h_max)?;
        let transposed =
            matmul_bounded(&a, &bh, a_max, nn * b_max * h_max)?.sub(&matmul_bounded(&c, &ht, c_max, h_max)?)?;
        if let Some(k) = first_nonzero(transposed.data()) {
            // entry (line, row) of (AB - C) H^T
            return Ok(Verdict::reject(
                Witness::ParityRow { side: Side::Transpose, row: k % rows, col: k / rows },
                stats,
            ));
        }
        Ok(Verdict::equal(stats))
    })
}

pub(super) fn revalidate_parity(inst: &Instance, side: Side, row: usize, col: usize) -> Result<bool> {
    let n = inst.n();
    if row >= n || col >= n {
        return Ok(false);
    }
    let (points, compute) = det_sparse_rings(&inst.ring, n)?;
    let pd = points.arith();
    // rows of H are x_j^i, independent of how many rows were used
    let h: Vec<Element> = (0..n).map(|j| pd.pow(points.nth_element(j as u128), row as u128)).collect();
    let (a, b, c) = cast_all(inst, &compute)?;
    let mut unit = vec![0; n];
    unit[col] = 1;
    // column `col` of AB - C, or row `col` for the transposed side
    let line = residual(&a, &b, &c, &unit, side)?;
    let d = compute.arith();
    Ok(h.iter().zip(&line).fold(0, |acc, (&x, &y)| d.mul_add(acc, x, y)) != 0)
}

/// Number of Cauchy columns `k'`: `ceil(sqrt(t) / eps)` rounded up to a
/// power of two, so that a column index costs exactly `log2 k'` bits.
pub fn rand_sparse_columns(t: u64, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("eps = {eps} outside (0, 1/2]")));
    }
    let k = ((t as f64).sqrt() / eps - 1e-9).ceil().max(1.0);
    if k > (1u64 << 62) as f64 {
        return Err(Error::InvalidArgument(format!("sqrt(t)/eps = {k} is too large")));
    }
    Ok((k as u64).next_power_of_two())
}

/// Randomized sparse verifier: one uniformly random column `s` of a Cauchy
/// matrix with `k'` columns; accept iff `A(Bs) = Cs` and
/// `B^T(A^T s) = C^T s`. Never rejects a true instance; under the promise
/// `||AB - C||_0 <= t` a false instance is accepted with probability at
/// most `eps`.
pub fn verify_rand_sparse(inst: &Instance, t: u64, eps: f64, src: &mut BitSource) -> Result<Verdict> {
    let n = inst.n();
    check_t(t, n)?;
    let k = rand_sparse_columns(t, eps)?;
    timed(|| {
        let (points, compute) = rand_sparse_field(&inst.ring, n, k)?;
        let start = src.bits_consumed();
        let i = src.next_bits(k.trailing_zeros()) as usize + 1;
        let s = cauchy_column(&points, n, k as usize, i)?;
        let (a, b, c) = cast_all(inst, &compute)?;
        let stats = RunStats { random_bits: src.bits_consumed() - start, elem_ops: 6 * (n * n) as u64, wall_nanos: 0 };
        let m = entry_bound(&compute);
        let maxes = [m, m, m];
        for side in [Side::Direct, Side::Transpose] {
            let r = residual_bounded(&a, &b, &c, maxes, &s, side)?;
            if let Some(index) = first_nonzero(&r) {
                let w = Witness::TestVector { vector: s, index, side, ring: compute };
                return Ok(Verdict::reject(w, stats));
            }
        }
        Ok(Verdict::equal(stats))
    })
}
