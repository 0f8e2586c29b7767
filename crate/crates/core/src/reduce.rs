//! Answer-preserving reductions between verification problems, and the
//! zero-test budget audit.
//!
//! Every reduction builds its output from `O(1)` blocks of size `n x n` and
//! reports the number of element writes it performed. Integer outputs carry
//! a magnitude bound large enough for every entry they contain.

use crate::error::{Error, Result};
use crate::matrix::{matmul, Matrix};
use crate::ring::{Arith, RingSpec};
use crate::verify::Instance;

/// A reduction output with its instrumentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced<T> {
    pub output: T,
    pub element_writes: u64,
}

/// A product-of-k instance: decide `A_1 ... A_k = C`, or `= 0` when `c` is
/// absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KInstance {
    pub mats: Vec<Matrix>,
    pub c: Option<Matrix>,
    pub ring: RingSpec,
}

impl KInstance {
    pub fn new(mats: Vec<Matrix>, c: Option<Matrix>) -> Result<Self> {
        if mats.len() < 2 {
            return Err(Error::InvalidArgument(format!("need k >= 2 matrices, got {}", mats.len())));
        }
        let ring = mats[0].ring().clone();
        let n = mats[0].rows();
        for m in mats.iter().chain(c.iter()) {
            if m.ring() != &ring {
                return Err(Error::RingMismatch { left: ring.to_string(), right: m.ring().to_string() });
            }
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimMismatch(format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols())));
            }
        }
        Ok(KInstance { mats, c, ring })
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn product(&self) -> Result<Matrix> {
        let mut acc = self.mats[0].clone();
        for m in &self.mats[1..] {
            acc = matmul(&acc, m)?;
        }
        Ok(acc)
    }

    /// Whether `A_1 ... A_k` equals `C` (or the zero matrix).
    pub fn holds(&self) -> Result<bool> {
        let p = self.product()?;
        Ok(match &self.c {
            Some(c) => &p == c,
            None => p.is_zero(),
        })
    }
}

/// Integer output ring with bound `bound`, fields unchanged.
fn widen(ring: &RingSpec, bound: impl FnOnce(u64) -> Option<u64>) -> Result<RingSpec> {
    match ring {
        RingSpec::Int { bound: m } => bound(*m)
            .map(|b| RingSpec::Int { bound: b })
            .ok_or_else(|| Error::MagnitudeOverflow(format!("reduced bound for M = {m} exceeds 64 bits"))),
        other => Ok(other.clone()),
    }
}

/// Builds block matrices and counts element writes.
struct Blocks {
    n: usize,
    writes: u64,
}

enum B<'a> {
    Zero,
    Id,
    M(&'a Matrix),
    Owned(Matrix),
}

impl Blocks {
    fn new(n: usize) -> Self {
        Blocks { n, writes: 0 }
    }

    fn count(&mut self, m: Matrix) -> B<'static> {
        self.writes += (m.rows() * m.cols()) as u64;
        B::Owned(m)
    }

    fn neg(&mut self, m: &Matrix) -> B<'static> {
        self.count(m.neg())
    }

    fn t(&mut self, m: &Matrix) -> Matrix {
        self.writes += (m.rows() * m.cols()) as u64;
        m.transpose()
    }

    fn add(&mut self, x: &Matrix, y: &Matrix) -> Result<B<'static>> {
        Ok(self.count(x.add(y)?))
    }

    fn sub(&mut self, x: &Matrix, y: &Matrix) -> Result<B<'static>> {
        Ok(self.count(x.sub(y)?))
    }

    /// Assembles a square grid of blocks over `out`.
    fn assemble(&mut self, grid: Vec<Vec<B<'_>>>, out: &RingSpec) -> Matrix {
        let n = self.n;
        let g = grid.len();
        let mut m = Matrix::zeros(out, g * n, g * n);
        for (bi, row) in grid.iter().enumerate() {
            for (bj, block) in row.iter().enumerate() {
                let (r0, c0) = (bi * n, bj * n);
                match block {
                    B::Zero => {}
                    B::Id => {
                        for i in 0..n {
                            m.set(r0 + i, c0 + i, 1);
                            self.writes += 1;
                        }
                    }
                    B::M(x) => self.copy(&mut m, x, r0, c0),
                    B::Owned(x) => self.copy(&mut m, x, r0, c0),
                }
            }
        }
        m
    }

    fn copy(&mut self, out: &mut Matrix, x: &Matrix, r0: usize, c0: usize) {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = x.get(i, j);
                if v != 0 {
                    out.set(r0 + i, c0 + j, v);
                    self.writes += 1;
                }
            }
        }
    }
}

/// MMV to AllZeroes: `A' = [[A, -I], [0, 0]]`, `B' = [[B, 0], [C, 0]]`, so
/// `A'B' = [[AB - C, 0], [0, 0]]` and `||A'B'||_0 = ||AB - C||_0`.
pub fn mmv_to_allzeroes(inst: &Instance) -> Result<Reduced<Instance>> {
    let n = inst.n();
    let out = widen(&inst.ring, |m| Some(m.max(1)))?;
    let mut bl = Blocks::new(n);
    let neg_id = bl.neg(&Matrix::identity(&inst.ring, n));
    let a = bl.assemble(vec![vec![B::M(&inst.a), neg_id], vec![B::Zero, B::Zero]], &out);
    let b = bl.assemble(vec![vec![B::M(&inst.b), B::Zero], vec![B::M(&inst.c), B::Zero]], &out);
    let c = Matrix::zeros(&out, 2 * n, 2 * n);
    let promise_t = inst.promise_t;
    Ok(Reduced { output: Instance::new(a, b, c, promise_t)?, element_writes: bl.writes })
}

/// AllZeroes to inverse verification:
/// `A' = [[I, A, 0], [0, I, B], [0, 0, I]]`,
/// `B' = [[I, -A, 0], [0, I, -B], [0, 0, I]]`, and `A'B' = I` iff `AB = 0`.
pub fn allzeroes_to_inverse(inst: &Instance) -> Result<Reduced<Instance>> {
    if !inst.c.is_zero() {
        return Err(Error::NotAllZeroesForm);
    }
    let n = inst.n();
    let out = widen(&inst.ring, |m| Some(m.max(1)))?;
    let mut bl = Blocks::new(n);
    let a = bl.assemble(
        vec![vec![B::Id, B::M(&inst.a), B::Zero], vec![B::Zero, B::Id, B::M(&inst.b)], vec![B::Zero, B::Zero, B::Id]],
        &out,
    );
    let (neg_a, neg_b) = (bl.neg(&inst.a), bl.neg(&inst.b));
    let b = bl
        .assemble(vec![vec![B::Id, neg_a, B::Zero], vec![B::Zero, B::Id, neg_b], vec![B::Zero, B::Zero, B::Id]], &out);
    let c = Matrix::identity(&out, 3 * n);
    bl.writes += 3 * n as u64;
    Ok(Reduced { output: Instance::new(a, b, c, None)?, element_writes: bl.writes })
}

/// MMV to inverse verification through AllZeroes (size `6n`).
pub fn mmv_to_inverse(inst: &Instance) -> Result<Reduced<Instance>> {
    let first = mmv_to_allzeroes(inst)?;
    let second = allzeroes_to_inverse(&first.output)?;
    Ok(Reduced { output: second.output, element_writes: first.element_writes + second.element_writes })
}

/// MMV to symmetric MMV with
///
/// ```text
/// A' = [[I, 0, A], [0, I, -A], [A^T, -A^T, I]]
/// B' = [[I, 0, B^T], [0, I, B^T], [B, B, I]]
/// C' = [[I + C, C, B^T + A], [-C, I - C, B^T - A], [A^T + B, -A^T + B, I]]
/// ```
///
/// `A'`, `B'` are symmetric and `A'B' = C'` iff `AB = C`.
pub fn mmv_to_symmetric(inst: &Instance) -> Result<Reduced<Instance>> {
    let n = inst.n();
    let r = &inst.ring;
    let out = widen(r, |m| m.checked_mul(2))?;
    let mut bl = Blocks::new(n);
    let id = Matrix::identity(r, n);
    let at = bl.t(&inst.a);
    let bt = bl.t(&inst.b);

    let neg_a = bl.neg(&inst.a);
    let neg_at = bl.neg(&at);
    let a = bl.assemble(
        vec![vec![B::Id, B::Zero, B::M(&inst.a)], vec![B::Zero, B::Id, neg_a], vec![B::M(&at), neg_at, B::Id]],
        &out,
    );
    let b = bl.assemble(
        vec![
            vec![B::Id, B::Zero, B::M(&bt)],
            vec![B::Zero, B::Id, B::M(&bt)],
            vec![B::M(&inst.b), B::M(&inst.b), B::Id],
        ],
        &out,
    );
    let c11 = bl.add(&id, &inst.c)?;
    let c13 = bl.add(&bt, &inst.a)?;
    let c21 = bl.neg(&inst.c);
    let c22 = bl.sub(&id, &inst.c)?;
    let c23 = bl.sub(&bt, &inst.a)?;
    let c31 = bl.add(&at, &inst.b)?;
    let c32 = bl.sub(&inst.b, &at)?;
    let c = bl.assemble(vec![vec![c11, B::M(&inst.c), c13], vec![c21, c22, c23], vec![c31, c32, B::Id]], &out);
    Ok(Reduced { output: Instance::new(a, b, c, None)?, element_writes: bl.writes })
}

/// Monochromatic all-pairs orthogonality to MMV. The rows of `vectors` are
/// the input vectors `a_1..a_n`; with `V` that matrix, the output is
/// `(V, V^T, diag(<a_i, a_i>))`, which holds iff all distinct pairs are
/// orthogonal.
pub fn mcapo_to_mmv(vectors: &Matrix) -> Result<Reduced<Instance>> {
    if !vectors.is_square() {
        return Err(Error::DimMismatch(format!(
            "expected n vectors of length n, got {}x{}",
            vectors.rows(),
            vectors.cols()
        )));
    }
    let n = vectors.rows();
    let r = vectors.ring();
    let out = widen(r, |m| m.checked_mul(m).and_then(|x| x.checked_mul(n as u64)).map(|x| x.max(m)))?;
    let d = r.arith();
    let mut bl = Blocks::new(n);
    let vt = bl.t(vectors);
    let a = bl.assemble(vec![vec![B::M(vectors)]], &out);
    let b = bl.assemble(vec![vec![B::M(&vt)]], &out);
    let mut c = Matrix::zeros(&out, n, n);
    for i in 0..n {
        let norm = vectors.row(i).iter().fold(0, |acc, &x| d.mul_add(acc, x, x));
        c.set(i, i, norm);
        bl.writes += 1;
    }
    Ok(Reduced { output: Instance::new(a, b, c, None)?, element_writes: bl.writes })
}

/// Whether all distinct pairs of rows of `vectors` are orthogonal, by
/// direct inner products.
pub fn mcapo_decide(vectors: &Matrix) -> bool {
    let d = vectors.ring().arith();
    let n = vectors.rows();
    (0..n).all(|i| {
        (i + 1..n).all(|j| vectors.row(i).iter().zip(vectors.row(j)).fold(0, |acc, (&x, &y)| d.mul_add(acc, x, y)) == 0)
    })
}

/// Product-of-k verification to the product-of-k all-zeroes test, with
///
/// ```text
/// A'_1 = [[A_1, I], [0, 0]]
/// A'_i = [[A_i, 0], [0, I]]     (1 < i < k)
/// A'_k = [[A_k, 0], [-C, 0]]
/// ```
///
/// The product telescopes to `[[A_1 ... A_k - C, 0], [0, 0]]`.
pub fn kmmv_to_kaz(kinst: &KInstance) -> Result<Reduced<KInstance>> {
    let c = kinst.c.as_ref().ok_or_else(|| Error::InvalidArgument("kmmv instance has no C".into()))?;
    let n = kinst.n();
    let k = kinst.k();
    let out = widen(&kinst.ring, |m| Some(m.max(1)))?;
    let mut bl = Blocks::new(n);
    let mut mats = Vec::with_capacity(k);
    mats.push(bl.assemble(vec![vec![B::M(&kinst.mats[0]), B::Id], vec![B::Zero, B::Zero]], &out));
    for m in &kinst.mats[1..k - 1] {
        mats.push(bl.assemble(vec![vec![B::M(m), B::Zero], vec![B::Zero, B::Id]], &out));
    }
    let neg_c = bl.neg(c);
    mats.push(bl.assemble(vec![vec![B::M(&kinst.mats[k - 1]), B::Zero], vec![neg_c, B::Zero]], &out));
    Ok(Reduced { output: KInstance::new(mats, None)?, element_writes: bl.writes })
}

/// A family of zero tests `L_i X R_i = 0` with `L_i` of `n^alpha_i` rows
/// and `R_i` of `n^beta_i` columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BudgetSpec {
    pub tests: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Sufficient,
    /// The family yields `O(n^(2 - deficit))` equations.
    Insufficient {
        deficit: f64,
    },
}

/// Whether a constant-size test family can certify an `n x n` matrix is
/// zero: the tests give `sum_i n^(alpha_i + beta_i)` linear equations,
/// which reaches `n^2` for all large `n` iff some `alpha_i + beta_i >= 2`.
pub fn budget_audit(spec: &BudgetSpec) -> Result<Budget> {
    let mut c_max: f64 = 0.0;
    for &(a, b) in &spec.tests {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidArgument(format!("exponents ({a}, {b}) outside [0, 1]")));
        }
        c_max = c_max.max(a + b);
    }
    if spec.tests.is_empty() {
        return Ok(Budget::Insufficient { deficit: 2.0 });
    }
    if c_max >= 2.0 {
        Ok(Budget::Sufficient)
    } else {
        Ok(Budget::Insufficient { deficit: 2.0 - c_max })
    }
}
