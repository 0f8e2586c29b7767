//! Structured matrices from coding theory.
//!
//! * Transpose-Vandermonde parity checks of Reed-Solomon codes: any `k'`
//!   columns are linearly independent, so `Hx != 0` whenever
//!   `0 < ||x||_0 <= k'`.
//! * Cauchy matrices `S[i][j] = 1 / (x_i - y_j)`, which are super regular:
//!   every square submatrix is non-singular.
//!
//! Points are taken from the canonical element enumeration of the field
//! ([`RingSpec::nth_element`]), which fixes every matrix bit-exactly.
//!
//! The brute-force certifiers [`check_mds_parity`] and [`check_k_regular`]
//! ship with the library so the CLI can run them as a self-check.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{Arith, Element, RingSpec};

/// Largest block length accepted by [`check_mds_parity`].
pub const MDS_ORACLE_MAX_N: usize = 14;
/// Largest row count accepted by [`check_mds_parity`].
pub const MDS_ORACLE_MAX_ROWS: usize = 7;
/// Largest dimension accepted by [`check_k_regular`].
pub const REGULAR_ORACLE_MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    /// `rows x n`, with `h[i][j] = points[j]^i`.
    pub h: Matrix,
    pub points: Vec<Element>,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchySpec {
    pub field: RingSpec,
    pub xs: Vec<Element>,
    pub ys: Vec<Element>,
}

fn require_field(field: &RingSpec) -> Result<u128> {
    field.field_size().ok_or_else(|| Error::InvalidArgument(format!("{field} is not a field")))
}

/// `rows x n` parity-check matrix of an MDS code over `field`.
pub fn vandermonde_parity_check(field: &RingSpec, rows: usize, n: usize) -> Result<ParityCheck> {
    let size = require_field(field)?;
    if n as u128 > size {
        return Err(Error::FieldTooSmall(format!("{n} distinct points needed, {field} has {size}")));
    }
    if rows == 0 || rows > n {
        return Err(Error::InvalidArgument(format!("need 1 <= rows <= n, got rows = {rows}, n = {n}")));
    }
    let d = field.arith();
    let points: Vec<Element> = (0..n as u128).map(|k| field.nth_element(k)).collect();
    let mut data = vec![0; rows * n];
    for (j, &x) in points.iter().enumerate() {
        let mut pow = 1;
        for i in 0..rows {
            data[i * n + j] = pow;
            pow = d.mul(pow, x);
        }
    }
    Ok(ParityCheck { h: Matrix::from_raw(field, rows, n, data), points, rows })
}

impl CauchySpec {
    /// Canonical points: `xs` are the first `n` field elements, `ys` the
    /// next `k`.
    pub fn canonical(field: &RingSpec, n: usize, k: usize) -> Result<Self> {
        let size = require_field(field)?;
        if (n + k) as u128 > size {
            return Err(Error::FieldTooSmall(format!("n + k = {} exceeds the field size {size} of {field}", n + k)));
        }
        Ok(CauchySpec {
            field: field.clone(),
            xs: (0..n as u128).map(|i| field.nth_element(i)).collect(),
            ys: (n as u128..(n + k) as u128).map(|i| field.nth_element(i)).collect(),
        })
    }

    pub fn column(&self, i: usize) -> Result<Vec<Element>> {
        if i == 0 || i > self.ys.len() {
            return Err(Error::InvalidArgument(format!("column {i} outside 1..={}", self.ys.len())));
        }
        let d = self.field.arith();
        let y = self.ys[i - 1];
        self.xs.iter().map(|&x| d.inv(d.sub(x, y))).collect()
    }

    pub fn matrix(&self) -> Result<Matrix> {
        let (n, k) = (self.xs.len(), self.ys.len());
        let mut m = Matrix::zeros(&self.field, n, k);
        for j in 0..k {
            for (i, v) in self.column(j + 1)?.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }
}

/// Column `i` (1-based) of the canonical `n x k` Cauchy matrix.
pub fn cauchy_column(field: &RingSpec, n: usize, k: usize, i: usize) -> Result<Vec<Element>> {
    CauchySpec::canonical(field, n, k)?.column(i)
}

/// The full canonical `n x k` Cauchy matrix.
pub fn cauchy_matrix(field: &RingSpec, n: usize, k: usize) -> Result<Matrix> {
    CauchySpec::canonical(field, n, k)?.matrix()
}

/// Determinant of the square Cauchy matrix on `xs`, `ys`:
///
/// `prod_{i<j} (x_j - x_i)(y_i - y_j) / prod_{i,j} (x_i - y_j)`.
pub fn cauchy_det_closed_form(field: &RingSpec, xs: &[Element], ys: &[Element]) -> Result<Element> {
    require_field(field)?;
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!("{} xs vs {} ys", xs.len(), ys.len())));
    }
    let mut all: Vec<Element> = xs.iter().chain(ys).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegeneratePoints);
    }
    let d = field.arith();
    let m = xs.len();
    let mut num = 1;
    for j in 0..m {
        for i in 0..j {
            num = d.mul(num, d.mul(d.sub(xs[j], xs[i]), d.sub(ys[i], ys[j])));
        }
    }
    let mut den = 1;
    for &x in xs {
        for &y in ys {
            den = d.mul(den, d.sub(x, y));
        }
    }
    Ok(d.mul(num, d.inv(den)?))
}

/// Determinant over a field by Gaussian elimination.
pub fn determinant(m: &Matrix) -> Result<Element> {
    require_field(m.ring())?;
    if !m.is_square() {
        return Err(Error::DimMismatch("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    let d = m.ring().arith();
    let mut a: Vec<Vec<Element>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else { return Ok(0) };
        if piv != c {
            a.swap(piv, c);
            det = d.neg(det);
        }
        det = d.mul(det, a[c][c]);
        let inv = d.inv(a[c][c])?;
        for r in c + 1..n {
            if a[r][c] == 0 {
                continue;
            }
            let f = d.mul(a[r][c], inv);
            for cc in c..n {
                let t = d.mul(f, a[c][cc]);
                a[r][cc] = d.sub(a[r][cc], t);
            }
        }
    }
    Ok(det)
}

fn submatrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    let data = rows.iter().flat_map(|&i| cols.iter().map(move |&j| m.get(i, j))).collect();
    Matrix::from_raw(m.ring(), rows.len(), cols.len(), data)
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order; stops
/// early when `f` returns `false`. Returns whether every call returned `true`.
fn all_combinations(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else { return true };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Brute force: true iff every `rows`-subset of columns of `h` is linearly
/// independent.
pub fn check_mds_parity(h: &Matrix) -> Result<bool> {
    require_field(h.ring())?;
    let (k, n) = (h.rows(), h.cols());
    if n > MDS_ORACLE_MAX_N || k > MDS_ORACLE_MAX_ROWS {
        return Err(Error::TooLargeForOracle(format!("{k}x{n} parity check")));
    }
    if k > n {
        return Ok(false);
    }
    let all_rows: Vec<usize> = (0..k).collect();
    let mut failure = None;
    let ok = all_combinations(n, k, |cols| match determinant(&submatrix(h, &all_rows, cols)) {
        Ok(det) => det != 0,
        Err(e) => {
            failure = Some(e);
            false
        }
    });
    failure.map_or(Ok(ok), Err)
}

/// Brute force: true iff every `k x k` submatrix of `s` is non-singular.
pub fn check_k_regular(s: &Matrix, k: usize) -> Result<bool> {
    require_field(s.ring())?;
    if s.rows() > REGULAR_ORACLE_MAX_DIM || s.cols() > REGULAR_ORACLE_MAX_DIM {
        return Err(Error::TooLargeForOracle(format!("{}x{} matrix", s.rows(), s.cols())));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let mut failure = None;
    let ok = all_combinations(s.rows(), k, |rows| {
        all_combinations(s.cols(), k, |cols| match determinant(&submatrix(s, rows, cols)) {
            Ok(det) => det != 0,
            Err(e) => {
                failure = Some(e);
                false
            }
        })
    });
    failure.map_or(Ok(ok), Err)
}

/// Outcome of one self-check family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// MDS certification of every Vandermonde parity check with `n <= max_n`,
/// `rows <= max_rows` over `Z_p`.
pub fn selfcheck_mds(p: u64, max_n: usize, max_rows: usize) -> Result<OracleReport> {
    let field = RingSpec::zmod(p)?;
    let mut report = OracleReport { name: format!("mds parity checks over zmod:{p}"), cases: 0, failures: vec![] };
    for n in 1..=max_n.min(p as usize) {
        for rows in 1..=max_rows.min(n) {
            let h = vandermonde_parity_check(&field, rows, n)?;
            report.cases += 1;
            if !check_mds_parity(&h.h)? {
                report.failures.push(format!("rows = {rows}, n = {n}"));
            }
        }
    }
    Ok(report)
}

/// Super-regularity of every canonical Cauchy matrix with `n, k <= max_dim`
/// over `Z_p`, at every submatrix size.
pub fn selfcheck_cauchy(p: u64, max_dim: usize) -> Result<OracleReport> {
    let field = RingSpec::zmod(p)?;
    let mut report =
        OracleReport { name: format!("cauchy super regularity over zmod:{p}"), cases: 0, failures: vec![] };
    for n in 1..=max_dim {
        for k in 1..=max_dim {
            if (n + k) as u64 > p {
                continue;
            }
            let s = cauchy_matrix(&field, n, k)?;
            for m in 1..=n.min(k) {
                report.cases += 1;
                if !check_k_regular(&s, m)? {
                    report.failures.push(format!("n = {n}, k = {k}, size {m}"));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn z(p: u64) -> RingSpec {
        RingSpec::zmod(p).unwrap()
    }

    fn mat(field: &RingSpec, rows: &[&[i128]]) -> Matrix {
        Matrix::from_rows(field, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    // Cofactor expansion along the first row; independent of `determinant`.
    fn cofactor_det(field: &RingSpec, a: &[Vec<Element>]) -> Element {
        let d = field.arith();
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        let mut acc = 0;
        for j in 0..n {
            let minor: Vec<Vec<Element>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                .collect();
            let term = d.mul(a[0][j], cofactor_det(field, &minor));
            acc = if j % 2 == 0 { d.add(acc, term) } else { d.sub(acc, term) };
        }
        acc
    }

    #[test]
    fn parity_check_examples() {
        let h = vandermonde_parity_check(&z(7), 2, 3).unwrap();
        assert_eq!(h.points, vec![0, 1, 2]);
        assert_eq!(h.h, mat(&z(7), &[&[1, 1, 1], &[0, 1, 2]]));
        let h = vandermonde_parity_check(&z(7), 1, 3).unwrap();
        assert_eq!(h.h, mat(&z(7), &[&[1, 1, 1]]));
        assert!(matches!(vandermonde_parity_check(&z(5), 2, 6), Err(Error::FieldTooSmall(_))));
        assert!(vandermonde_parity_check(&z(5), 0, 3).is_err());
    }

    #[test]
    fn z5_pairs_of_columns_independent() {
        let h = vandermonde_parity_check(&z(5), 2, 5).unwrap().h;
        let d = z(5).arith();
        for i in 0..5 {
            for j in i + 1..5 {
                let det = d.sub(d.mul(h.get(0, i), h.get(1, j)), d.mul(h.get(0, j), h.get(1, i)));
                assert_ne!(det, 0, "columns {i}, {j}");
            }
        }
        assert!(check_mds_parity(&h).unwrap());
    }

    #[test]
    fn mds_oracle_examples() {
        assert!(check_mds_parity(&mat(&z(7), &[&[1, 1, 1], &[0, 1, 2]])).unwrap());
        assert!(!check_mds_parity(&mat(&z(7), &[&[1, 1], &[1, 1]])).unwrap());
        assert!(check_mds_parity(&mat(&z(7), &[&[1, 1, 1]])).unwrap());
        let big = Matrix::zeros(&z(17), 2, 15);
        assert!(matches!(check_mds_parity(&big), Err(Error::TooLargeForOracle(_))));
    }

    #[test]
    fn vandermonde_is_mds_over_small_primes() {
        for p in [5u64, 7, 11, 13] {
            let report = selfcheck_mds(p, p as usize, 6).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn vandermonde_is_mds_over_extension() {
        let f = RingSpec::gf(2, 3).unwrap();
        for rows in 1..=4 {
            let h = vandermonde_parity_check(&f, rows, 8).unwrap();
            assert!(check_mds_parity(&h.h).unwrap());
        }
    }

    #[test]
    fn cauchy_column_examples() {
        assert_eq!(cauchy_column(&z(7), 2, 2, 1).unwrap(), vec![3, 6]);
        assert_eq!(cauchy_column(&z(7), 2, 2, 2).unwrap(), vec![2, 3]);
        assert!(matches!(cauchy_column(&z(5), 3, 3, 1), Err(Error::FieldTooSmall(_))));
        assert!(cauchy_column(&z(7), 2, 2, 3).is_err());
        assert!(cauchy_column(&z(7), 2, 2, 0).is_err());
    }

    #[test]
    fn cauchy_det_examples() {
        assert_eq!(cauchy_det_closed_form(&z(7), &[0], &[2]).unwrap(), 3);
        assert_eq!(cauchy_det_closed_form(&z(7), &[0, 1], &[2, 3]).unwrap(), 4);
        let s = cauchy_matrix(&z(7), 2, 2).unwrap();
        assert_eq!(s, mat(&z(7), &[&[3, 2], &[6, 3]]));
        assert_eq!(determinant(&s).unwrap(), 4);
        assert_eq!(cauchy_det_closed_form(&z(7), &[0, 1], &[1, 3]), Err(Error::DegeneratePoints));
        assert_eq!(cauchy_det_closed_form(&z(7), &[0, 0], &[2, 3]), Err(Error::DegeneratePoints));
    }

    #[test]
    fn closed_form_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for field in [z(13), z(101), RingSpec::gf(3, 3).unwrap()] {
            let q = field.field_size().unwrap() as u64;
            for _ in 0..100 {
                let m = 1 + (rng.next_u32() % 4) as usize;
                // 2m distinct points by partial shuffle
                let mut pool: Vec<u64> = (0..q).collect();
                for i in 0..2 * m {
                    let j = i + (rng.next_u64() % (q - i as u64)) as usize;
                    pool.swap(i, j);
                }
                let pts: Vec<Element> = pool[..2 * m].iter().map(|&k| field.nth_element(k as u128)).collect();
                let (xs, ys) = pts.split_at(m);
                let spec = CauchySpec { field: field.clone(), xs: xs.to_vec(), ys: ys.to_vec() };
                let s = spec.matrix().unwrap();
                let rows: Vec<Vec<Element>> = (0..m).map(|i| s.row(i).to_vec()).collect();
                let brute = cofactor_det(&field, &rows);
                let closed = cauchy_det_closed_form(&field, xs, ys).unwrap();
                assert_eq!(closed, brute);
                assert_ne!(closed, 0);
                assert_eq!(determinant(&s).unwrap(), brute);
            }
        }
    }

    #[test]
    fn regularity_oracle_examples() {
        let s = cauchy_matrix(&z(7), 2, 2).unwrap();
        assert!(check_k_regular(&s, 2).unwrap());
        assert!(check_k_regular(&s, 1).unwrap());
        assert!(!check_k_regular(&Matrix::identity(&z(7), 3), 2).unwrap());
        assert!(matches!(check_k_regular(&Matrix::zeros(&z(7), 9, 2), 1), Err(Error::TooLargeForOracle(_))));
    }

    #[test]
    fn cauchy_matrices_are_super_regular() {
        for p in [13u64, 17] {
            let report = selfcheck_cauchy(p, 6).unwrap();
            assert!(report.passed(), "{report:?}");
            assert!(report.cases > 0);
        }
    }

    #[test]
    fn cauchy_kernel_distance() {
        // non-zero x with ||x||_0 <= m gives ||x^T S||_0 >= k - m + 1
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = z(13);
        let d = field.arith();
        for _ in 0..2000 {
            let n = 1 + (rng.next_u32() % 6) as usize;
            let k = 1 + (rng.next_u32() % 6) as usize;
            let s = cauchy_matrix(&field, n, k).unwrap();
            let m = 1 + (rng.next_u32() as usize % n.min(k));
            let mut x = vec![0; n];
            for _ in 0..m {
                x[(rng.next_u32() as usize) % n] = 1 + (rng.next_u32() % 12) as i128;
            }
            let support = x.iter().filter(|&&v| v != 0).count();
            let prod: Vec<Element> =
                (0..k).map(|j| (0..n).fold(0, |acc, i| d.mul_add(acc, x[i], s.get(i, j)))).collect();
            let weight = prod.iter().filter(|&&v| v != 0).count();
            assert!(weight + support > k, "n={n} k={k} x={x:?} weight={weight}");
        }
    }

    #[test]
    fn combinations_enumerate_binomial_count() {
        let mut count = 0;
        all_combinations(6, 3, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 20);
    }
}
