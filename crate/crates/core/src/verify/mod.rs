//! Matrix multiplication verifiers.
//!
//! Every verifier takes an [`Instance`] `(A, B, C)` and decides whether
//! `AB = C`, returning a [`Verdict`] with a re-checkable [`Witness`] on
//! rejection and [`RunStats`] (random bits, ring multiplications, time).

mod baseline;
pub mod bits;
mod sparse;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::{matvec_bounded, vecmat_bounded, Matrix};
use crate::ring::{Arith, Element, RingSpec};

pub use baseline::{
    geometric_check_ring, mps_decide, verify_exact, verify_freivalds, verify_geometric, verify_kimbrel_sinha,
    verify_korec_wiedermann, verify_mps, KW_DEFAULT_CAP,
};
pub use bits::{derive_seed, BitSource};
pub use sparse::{
    det_sparse_rings, parity_rows_for, rand_sparse_columns, rand_sparse_field, verify_det_sparse, verify_rand_sparse,
};

/// An MMV instance: decide `AB = C` for square `A`, `B`, `C` over `ring`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub ring: RingSpec,
    /// Promise `||AB - C||_0 <= t`.
    pub promise_t: Option<u64>,
}

impl Instance {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, promise_t: Option<u64>) -> Result<Self> {
        let ring = a.ring().clone();
        let n = a.rows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if m.ring() != &ring {
                return Err(Error::RingMismatch { left: ring.to_string(), right: m.ring().to_string() });
            }
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimMismatch(format!("{name} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
            }
            if let Some(bound) = ring.int_bound() {
                if m.max_abs() > bound as u128 {
                    return Err(Error::MagnitudeOverflow(format!("{name} has an entry above the bound {bound}")));
                }
            }
        }
        Ok(Instance { a, b, c, ring, promise_t })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Equal,
    NotEqual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// A statement about `AB - C`.
    Direct,
    /// A statement about `(AB - C)^T`.
    Transpose,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `(AB - C)[row][col] != 0`.
    Entry { row: usize, col: usize },
    /// Over `ring`, `(A(Bv) - Cv)[index] != 0` (Direct) or
    /// `(B^T(A^T v) - C^T v)[index] != 0` (Transpose).
    TestVector { vector: Vec<Element>, index: usize, side: Side, ring: RingSpec },
    /// Entry `(row, col)` of `H(AB - C)` (Direct) or `H(AB - C)^T`
    /// (Transpose) is non-zero, with `H` the parity check used by
    /// [`verify_det_sparse`].
    ParityRow { side: Side, row: usize, col: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub random_bits: u64,
    /// Ring multiplications, counted from operand shapes.
    pub elem_ops: u64,
    pub wall_nanos: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<Witness>,
    pub stats: RunStats,
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        self.answer == Answer::Equal
    }

    pub(crate) fn equal(stats: RunStats) -> Self {
        Verdict { answer: Answer::Equal, witness: None, stats }
    }

    pub(crate) fn reject(witness: Witness, stats: RunStats) -> Self {
        Verdict { answer: Answer::NotEqual, witness: Some(witness), stats }
    }
}

/// Runs `f` and stores its elapsed time in the verdict.
pub(crate) fn timed(f: impl FnOnce() -> Result<Verdict>) -> Result<Verdict> {
    let start = Instant::now();
    let mut v = f()?;
    v.stats.wall_nanos = start.elapsed().as_nanos() as u64;
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Exact,
    Freivalds,
    KimbrelSinha,
    KorecWiedermann,
    Geometric,
    DetSparse,
    RandSparse,
    Mps,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Exact,
        Algorithm::Freivalds,
        Algorithm::KimbrelSinha,
        Algorithm::KorecWiedermann,
        Algorithm::Geometric,
        Algorithm::DetSparse,
        Algorithm::RandSparse,
        Algorithm::Mps,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Freivalds => "freivalds",
            Algorithm::KimbrelSinha => "kimbrel-sinha",
            Algorithm::KorecWiedermann => "korec-wiedermann",
            Algorithm::Geometric => "geometric",
            Algorithm::DetSparse => "det-sparse",
            Algorithm::RandSparse => "rand-sparse",
            Algorithm::Mps => "mps",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Freivalds | Algorithm::KimbrelSinha | Algorithm::RandSparse)
    }

    /// Whether the verifier reads the sparsity parameter `t`.
    pub fn uses_sparsity(self) -> bool {
        matches!(self, Algorithm::Geometric | Algorithm::DetSparse | Algorithm::RandSparse)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.token() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Verifier parameters. `t = None` falls back to the instance promise and
/// then to `n^2`, for which the sparse verifiers are exact unconditionally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub t: Option<u64>,
    pub eps: f64,
    pub rounds: u32,
    pub kw_cap: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { t: None, eps: 0.25, rounds: 1, kw_cap: KW_DEFAULT_CAP }
    }
}

impl Params {
    pub fn sparsity(&self, inst: &Instance) -> u64 {
        let n = inst.n() as u64;
        self.t.or(inst.promise_t).unwrap_or(n * n)
    }
}

/// Dispatches to the verifier named by `alg`. Deterministic verifiers
/// ignore `seed`.
pub fn run(alg: Algorithm, inst: &Instance, params: &Params, seed: u64) -> Result<Verdict> {
    let t = params.sparsity(inst);
    match alg {
        Algorithm::Exact => verify_exact(inst),
        Algorithm::Freivalds => verify_freivalds(inst, params.rounds, &mut BitSource::new(seed)),
        Algorithm::KimbrelSinha => verify_kimbrel_sinha(inst, &mut BitSource::new(seed)),
        Algorithm::KorecWiedermann => verify_korec_wiedermann(inst, params.kw_cap),
        Algorithm::Geometric => verify_geometric(inst, t.max(1)),
        Algorithm::DetSparse => verify_det_sparse(inst, t),
        Algorithm::RandSparse => verify_rand_sparse(inst, t, params.eps, &mut BitSource::new(seed)),
        Algorithm::Mps => verify_mps(inst),
    }
}

fn first_nonzero(v: &[Element]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

/// `A(Bv) - Cv` (Direct) or `B^T(A^T v) - C^T v` (Transpose), with all
/// operands already over the same ring.
pub(crate) fn residual(a: &Matrix, b: &Matrix, c: &Matrix, v: &[Element], side: Side) -> Result<Vec<Element>> {
    residual_bounded(a, b, c, [a.max_abs(), b.max_abs(), c.max_abs()], v, side)
}

/// Bound on the entries of a validated instance over `ring`: `M` for
/// integers, the largest canonical representative for fields.
pub(crate) fn entry_bound(ring: &RingSpec) -> u128 {
    match ring.int_bound() {
        Some(m) => m as u128,
        None => ring.field_size().map_or(0, |q| q - 1),
    }
}

/// [`residual`] given `max|A|`, `max|B|`, `max|C|`.
pub(crate) fn residual_bounded(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    [a_max, b_max, c_max]: [u128; 3],
    v: &[Element],
    side: Side,
) -> Result<Vec<Element>> {
    let d = a.ring().arith();
    let (lhs, rhs) = match side {
        Side::Direct => (matvec_bounded(a, a_max, &matvec_bounded(b, b_max, v)?)?, matvec_bounded(c, c_max, v)?),
        Side::Transpose => (vecmat_bounded(&vecmat_bounded(v, a, a_max)?, b, b_max)?, vecmat_bounded(v, c, c_max)?),
    };
    Ok(lhs.iter().zip(&rhs).map(|(&x, &y)| d.sub(x, y)).collect())
}

/// `(AB - C)[i][j]` by one inner product.
pub fn difference_entry(inst: &Instance, i: usize, j: usize) -> Result<Element> {
    let n = inst.n();
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!("entry ({i}, {j}) outside {n}x{n}")));
    }
    let d = inst.ring.arith();
    let dot = (0..n).fold(0, |acc, k| d.mul_add(acc, inst.a.get(i, k), inst.b.get(k, j)));
    Ok(d.sub(dot, inst.c.get(i, j)))
}

/// Recomputes the claim a witness makes about `inst`.
pub fn revalidate(inst: &Instance, witness: &Witness) -> Result<bool> {
    match witness {
        Witness::Entry { row, col } => Ok(difference_entry(inst, *row, *col)? != 0),
        Witness::TestVector { vector, index, side, ring } => {
            if vector.len() != inst.n() || !vector.iter().all(|&x| ring.is_canonical(x)) {
                return Ok(false);
            }
            let (a, b, c) = (inst.a.cast(ring)?, inst.b.cast(ring)?, inst.c.cast(ring)?);
            let r = residual(&a, &b, &c, vector, *side)?;
            Ok(r.get(*index).is_some_and(|&x| x != 0))
        }
        Witness::ParityRow { side, row, col } => sparse::revalidate_parity(inst, *side, *row, *col),
    }
}
