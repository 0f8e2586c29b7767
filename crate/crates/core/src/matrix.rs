//! Dense row-major matrices over a [`RingSpec`].

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Arith, Element, RingSpec};
use crate::with_arith;

/// Edge length of the square tiles used by [`matmul`].
pub const TILE: usize = 64;

/// Integer intermediates must stay strictly below this magnitude.
pub(crate) const INT_LIMIT: u128 = 1 << 126;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    ring: RingSpec,
    data: Vec<Element>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&x| self.ring.format_element(x)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(ring: &RingSpec, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, ring: ring.clone(), data: vec![0; rows * cols] }
    }

    pub fn identity(ring: &RingSpec, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-canonical elements.
    pub fn from_vec(ring: &RingSpec, rows: usize, cols: usize, data: Vec<Element>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!("{} elements for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(&bad) = data.iter().find(|&&x| !ring.is_canonical(x)) {
            return Err(Error::InvalidArgument(format!("{bad} is not canonical in {ring}")));
        }
        Ok(Matrix { rows, cols, ring: ring.clone(), data })
    }

    pub fn from_rows(ring: &RingSpec, rows: &[Vec<Element>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimMismatch("ragged rows".into()));
        }
        Self::from_vec(ring, rows.len(), cols, rows.concat())
    }

    /// Unchecked constructor for data produced by ring arithmetic.
    pub(crate) fn from_raw(ring: &RingSpec, rows: usize, cols: usize, data: Vec<Element>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, ring: ring.clone(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn data(&self) -> &[Element] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Element {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: Element) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Element> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix::from_raw(&self.ring, self.cols, self.rows, data)
    }

    /// Largest absolute entry (as an integer representative).
    pub fn max_abs(&self) -> u128 {
        max_abs(&self.data)
    }

    /// Re-expresses the matrix over `target`. Supported: integers into
    /// `Z_q` (reduction), integers into integers, and a prime field into any
    /// field of the same characteristic (constants embed unchanged).
    pub fn cast(&self, target: &RingSpec) -> Result<Matrix> {
        use RingSpec::*;
        let data = match (&self.ring, target) {
            (Int { .. }, Int { .. }) => self.data.clone(),
            (Int { .. }, _) => {
                let a = target.arith();
                self.data.iter().map(|&x| a.from_int(x)).collect()
            }
            (PrimeField { p }, PrimeField { p: q }) | (PrimeField { p }, ExtField { p: q, .. }) if p == q => {
                self.data.clone()
            }
            (ExtField { .. }, _) if &self.ring == target => self.data.clone(),
            _ => return Err(Error::RingMismatch { left: self.ring.to_string(), right: target.to_string() }),
        };
        Ok(Matrix::from_raw(target, self.rows, self.cols, data))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |d, x, y| d.add(x, y))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |d, x, y| d.sub(x, y))
    }

    pub fn neg(&self) -> Matrix {
        let d = self.ring.arith();
        let data = self.data.iter().map(|&x| d.neg(x)).collect();
        Matrix::from_raw(&self.ring, self.rows, self.cols, data)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        f: impl Fn(&crate::ring::Arithmetic, Element, Element) -> Element,
    ) -> Result<Matrix> {
        same_ring(&self.ring, &other.ring)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        if !self.ring.is_field() && self.max_abs() + other.max_abs() >= INT_LIMIT {
            return Err(Error::MagnitudeOverflow("matrix sum".into()));
        }
        let d = self.ring.arith();
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| f(&d, x, y)).collect();
        Ok(Matrix::from_raw(&self.ring, self.rows, self.cols, data))
    }
}

/// `data` as `i64`s, or `None` if some entry exceeds `bound` (< 2^63).
fn to_i64_within(data: &[Element], bound: u128) -> Option<Vec<i64>> {
    let bound = bound as u64;
    let mut over = false;
    let out = data
        .iter()
        .map(|&x| {
            let y = x as i64;
            over |= (y as i128 != x) | (y.unsigned_abs() > bound);
            y
        })
        .collect();
    (!over).then_some(out)
}

/// Branch-free, since entry signs are often random.
pub(crate) fn max_abs(data: &[Element]) -> u128 {
    data.iter().fold(0, |m, &x| {
        let s = x >> 127;
        let a = (x ^ s).wrapping_sub(s) as u128;
        if a > m {
            a
        } else {
            m
        }
    })
}

pub(crate) fn same_ring(a: &RingSpec, b: &RingSpec) -> Result<()> {
    if a != b {
        return Err(Error::RingMismatch { left: a.to_string(), right: b.to_string() });
    }
    Ok(())
}

/// Rejects integer products `inner * max|a| * max|b|` that could leave the
/// 127-bit range.
pub(crate) fn check_int_product(ring: &RingSpec, inner: usize, a_max: u128, b_max: u128) -> Result<()> {
    if ring.is_field() {
        return Ok(());
    }
    let bound = (inner as u128).checked_mul(a_max).and_then(|x| x.checked_mul(b_max));
    match bound {
        Some(b) if b < INT_LIMIT => Ok(()),
        _ => Err(Error::MagnitudeOverflow(format!("inner dimension {inner} with magnitudes {a_max} and {b_max}"))),
    }
}

/// Exact classical product `AB`, cache-blocked with [`TILE`].
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    matmul_tiled(a, b, TILE)
}

/// [`matmul`] with an explicit tile size; the result does not depend on it.
pub fn matmul_tiled(a: &Matrix, b: &Matrix, tile: usize) -> Result<Matrix> {
    product(a, b, a.max_abs(), b.max_abs(), tile)
}

/// [`matmul`] given claimed bounds on `max|a|` and `max|b|`. Claims are
/// checked while converting to machine words, and a wrong one costs a
/// rescan rather than a wrong product.
pub(crate) fn matmul_bounded(a: &Matrix, b: &Matrix, a_max: u128, b_max: u128) -> Result<Matrix> {
    product(a, b, a_max, b_max, TILE)
}

fn product(a: &Matrix, b: &Matrix, a_max: u128, b_max: u128, tile: usize) -> Result<Matrix> {
    same_ring(&a.ring, &b.ring)?;
    if a.cols != b.rows {
        return Err(Error::DimMismatch(format!("cannot multiply {}x{} by {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    check_int_product(&a.ring, a.cols, a_max, b_max)?;
    let (m, k, n, tile) = (a.rows, a.cols, b.cols, tile.max(1));
    let out = match a.ring {
        RingSpec::Int { .. } if (k as u128) * a_max * b_max < 1 << 63 => {
            let (Some(a64), Some(b64)) = (to_i64_within(&a.data, a_max), to_i64_within(&b.data, b_max)) else {
                // a claimed bound was wrong; the true maxima always convert
                return product(a, b, a.max_abs(), b.max_abs(), tile);
            };
            let mut out = vec![0i64; m * n];
            gemm_small(&a64, &b64, &mut out, m, k, n, tile, |o, x, y| o.wrapping_add(x.wrapping_mul(y)));
            out.into_iter().map(Element::from).collect()
        }
        RingSpec::PrimeField { p } if p < 1 << 32 => {
            let a64: Vec<u64> = a.data.iter().map(|&x| x as u64).collect();
            let b64: Vec<u64> = b.data.iter().map(|&x| x as u64).collect();
            let mut out = vec![0u64; m * n];
            // (p - 1)^2 + p - 1 < 2^64
            gemm_small(&a64, &b64, &mut out, m, k, n, tile, |o, x, y| (o + x * y) % p);
            out.into_iter().map(Element::from).collect()
        }
        _ => {
            let mut out = vec![0; m * n];
            with_arith!(a.ring, |d| gemm(d, &a.data, &b.data, &mut out, m, k, n, tile));
            out
        }
    };
    Ok(Matrix::from_raw(&a.ring, m, n, out))
}

/// Blocked product over a machine-word representation, four rows of `a`
/// at a time so each loaded row of `b` feeds four accumulators.
#[allow(clippy::too_many_arguments)]
fn gemm_small<T: Copy + Default + PartialEq>(
    a: &[T],
    b: &[T],
    out: &mut [T],
    m: usize,
    k: usize,
    n: usize,
    tile: usize,
    fma: impl Fn(T, T, T) -> T + Copy,
) {
    let zero = T::default();
    for k0 in (0..k).step_by(tile) {
        let k1 = (k0 + tile).min(k);
        for j0 in (0..n).step_by(tile) {
            let j1 = (j0 + tile).min(n);
            let mut i = 0;
            while i + 4 <= m {
                let (r0, rest) = out[i * n..(i + 4) * n].split_at_mut(n);
                let (r1, rest) = rest.split_at_mut(n);
                let (r2, r3) = rest.split_at_mut(n);
                let (r0, r1, r2, r3) = (&mut r0[j0..j1], &mut r1[j0..j1], &mut r2[j0..j1], &mut r3[j0..j1]);
                for kk in k0..k1 {
                    let (x0, x1, x2, x3) =
                        (a[i * k + kk], a[(i + 1) * k + kk], a[(i + 2) * k + kk], a[(i + 3) * k + kk]);
                    let brow = &b[kk * n + j0..kk * n + j1];
                    for (j, &y) in brow.iter().enumerate() {
                        r0[j] = fma(r0[j], x0, y);
                        r1[j] = fma(r1[j], x1, y);
                        r2[j] = fma(r2[j], x2, y);
                        r3[j] = fma(r3[j], x3, y);
                    }
                }
                i += 4;
            }
            for i in i..m {
                let orow = &mut out[i * n + j0..i * n + j1];
                for kk in k0..k1 {
                    let x = a[i * k + kk];
                    if x == zero {
                        continue;
                    }
                    for (o, &y) in orow.iter_mut().zip(&b[kk * n + j0..kk * n + j1]) {
                        *o = fma(*o, x, y);
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn gemm<D: Arith>(d: &D, a: &[Element], b: &[Element], out: &mut [Element], m: usize, k: usize, n: usize, tile: usize) {
    for i0 in (0..m).step_by(tile) {
        let i1 = (i0 + tile).min(m);
        for k0 in (0..k).step_by(tile) {
            let k1 = (k0 + tile).min(k);
            for j0 in (0..n).step_by(tile) {
                let j1 = (j0 + tile).min(n);
                for i in i0..i1 {
                    let orow = &mut out[i * n + j0..i * n + j1];
                    for kk in k0..k1 {
                        let aik = a[i * k + kk];
                        if aik == 0 {
                            continue;
                        }
                        let brow = &b[kk * n + j0..kk * n + j1];
                        for (o, &bv) in orow.iter_mut().zip(brow) {
                            *o = d.mul_add(*o, aik, bv);
                        }
                    }
                }
            }
        }
    }
}

/// `A v` for a column vector `v`.
pub fn matvec(a: &Matrix, v: &[Element]) -> Result<Vec<Element>> {
    matvec_bounded(a, a.max_abs(), v)
}

/// `v^T A` for a row vector `v`.
pub fn vecmat(v: &[Element], a: &Matrix) -> Result<Vec<Element>> {
    vecmat_bounded(v, a, a.max_abs())
}

/// Dot products of `v` with rows of `a`, on machine words when the ring
/// and magnitudes allow.
enum Word {
    /// Every partial sum fits in an `i64`.
    Int64,
    /// `Z_p` with `p < 2^32`: products fit in 64 bits, sums are reduced once.
    Mod32(u64),
    Generic,
}

fn word_kind(ring: &RingSpec, inner: usize, a_max: u128, v_max: u128) -> Word {
    match ring {
        RingSpec::Int { .. } if (inner as u128).saturating_mul(a_max).saturating_mul(v_max) < 1 << 63 => Word::Int64,
        RingSpec::PrimeField { p } if *p < 1 << 32 => Word::Mod32(*p),
        _ => Word::Generic,
    }
}

/// `a_max` is a claimed bound on `max|a|`; entries are checked against it
/// on the fly and a wrong claim falls back to the exact maximum.
pub(crate) fn matvec_bounded(a: &Matrix, a_max: u128, v: &[Element]) -> Result<Vec<Element>> {
    if a.cols != v.len() {
        return Err(Error::DimMismatch(format!("{}x{} times vector of length {}", a.rows, a.cols, v.len())));
    }
    let v_max = max_abs(v);
    check_int_product(&a.ring, a.cols, a_max, v_max)?;
    let rows = (0..a.rows).map(|i| a.row(i));
    Ok(match word_kind(&a.ring, a.cols, a_max, v_max) {
        Word::Int64 => {
            let bound = a_max as u64;
            let mut over = false;
            let out: Vec<Element> = rows
                .map(|r| {
                    r.iter().zip(v).fold(0i64, |acc, (&x, &y)| {
                        let x64 = x as i64;
                        over |= (x64 as i128 != x) | (x64.unsigned_abs() > bound);
                        acc.wrapping_add(x64.wrapping_mul(y as i64))
                    })
                })
                .map(Element::from)
                .collect();
            if over {
                return matvec_bounded(a, a.max_abs(), v);
            }
            out
        }
        Word::Mod32(p) => rows
            .map(|r| r.iter().zip(v).fold(0u128, |acc, (&x, &y)| acc + (x as u64 * y as u64) as u128))
            .map(|s| (s % p as u128) as Element)
            .collect(),
        Word::Generic => with_arith!(a.ring, |d| {
            rows.map(|r| r.iter().zip(v).fold(0, |acc, (&x, &y)| d.mul_add(acc, x, y))).collect()
        }),
    })
}

pub(crate) fn vecmat_bounded(v: &[Element], a: &Matrix, a_max: u128) -> Result<Vec<Element>> {
    if a.rows != v.len() {
        return Err(Error::DimMismatch(format!("vector of length {} times {}x{}", v.len(), a.rows, a.cols)));
    }
    let v_max = max_abs(v);
    check_int_product(&a.ring, a.rows, a_max, v_max)?;
    let nonzero = v.iter().enumerate().filter(|(_, &x)| x != 0);
    Ok(match word_kind(&a.ring, a.rows, a_max, v_max) {
        Word::Int64 => {
            let bound = a_max as u64;
            let mut over = false;
            let mut out = vec![0i64; a.cols];
            for (i, &vi) in nonzero {
                let vi = vi as i64;
                for (o, &x) in out.iter_mut().zip(a.row(i)) {
                    let x64 = x as i64;
                    over |= (x64 as i128 != x) | (x64.unsigned_abs() > bound);
                    *o = o.wrapping_add(vi.wrapping_mul(x64));
                }
            }
            if over {
                return vecmat_bounded(v, a, a.max_abs());
            }
            out.into_iter().map(Element::from).collect()
        }
        Word::Mod32(p) => {
            let mut out = vec![0u128; a.cols];
            for (i, &vi) in nonzero {
                let vi = vi as u64;
                for (o, &x) in out.iter_mut().zip(a.row(i)) {
                    *o += (vi * x as u64) as u128;
                }
            }
            out.into_iter().map(|s| (s % p as u128) as Element).collect()
        }
        Word::Generic => {
            let mut out = vec![0; a.cols];
            with_arith!(a.ring, |d| {
                for (i, &vi) in nonzero {
                    for (o, &x) in out.iter_mut().zip(a.row(i)) {
                        *o = d.mul_add(*o, vi, x);
                    }
                }
            });
            out
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Row,
    Col,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineWitness {
    pub axis: Axis,
    pub index: usize,
    pub nnz: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsityReport {
    pub nnz: usize,
    pub witness_line: Option<LineWitness>,
}

/// Number of non-zero entries.
pub fn nnz(m: &Matrix) -> SparsityReport {
    SparsityReport { nnz: m.data.iter().filter(|&&x| x != 0).count(), witness_line: None }
}

/// Integer square root (floor).
pub(crate) fn isqrt(t: u64) -> u64 {
    let mut r = (t as f64).sqrt() as u64;
    while r * r > t {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= t {
        r += 1;
    }
    r
}

/// A non-zero row or column with at most `floor(sqrt(t))` non-zeros.
///
/// Rows are scanned before columns, each in ascending index order. Such a
/// line always exists when `0 < nnz(M) <= t`.
pub fn sparse_line_witness(m: &Matrix, t: u64) -> Result<SparsityReport> {
    let total = nnz(m).nnz;
    if total == 0 {
        return Err(Error::NoWitness);
    }
    let limit = isqrt(t) as usize;
    let row_counts = (0..m.rows).map(|i| (Axis::Row, i, m.row(i).iter().filter(|&&x| x != 0).count()));
    let col_counts = (0..m.cols).map(|j| (Axis::Col, j, (0..m.rows).filter(|&i| m.get(i, j) != 0).count()));
    row_counts
        .chain(col_counts)
        .find(|&(_, _, c)| c > 0 && c <= limit)
        .map(|(axis, index, nnz)| SparsityReport { nnz: total, witness_line: Some(LineWitness { axis, index, nnz }) })
        .ok_or(Error::NoWitness)
}
