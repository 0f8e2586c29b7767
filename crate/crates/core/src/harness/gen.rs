//! Seeded instances with a planted number of errors.

use crate::error::{Error, Result};
use crate::matrix::{isqrt, matmul, Matrix};
use crate::ring::{Arith, Element, RingSpec};
use crate::verify::{BitSource, Instance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedConfig {
    pub n: usize,
    pub ring: RingSpec,
    /// Exact number of non-zero entries of `AB - C`.
    pub s: u64,
    pub seed: u64,
}

fn random_matrix(
    ring: &RingSpec,
    n: usize,
    src: &mut BitSource,
    draw: &mut impl FnMut(&mut BitSource) -> Element,
) -> Matrix {
    let data = (0..n * n).map(|_| draw(src)).collect();
    Matrix::from_vec(ring, n, n, data).expect("generated entries are canonical")
}

/// `A`, `B` uniform, `C = AB` except at `s` distinct positions, with
/// promise `t = s`.
///
/// Field entries are uniform over the field and each planted position gets
/// a uniform non-zero delta. For `int:M`, entries of `A` and `B` are
/// uniform in `[-a, a]` with `a = floor(sqrt(M / n))`, which keeps `AB`
/// within `[-M, M]`; a planted position of `C` is replaced by a uniform
/// value of `[-M, M]` other than the true product, so `C` respects the
/// bound as well.
pub fn gen_planted(cfg: &PlantedConfig) -> Result<Instance> {
    let n = cfg.n;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let cells = (n as u64) * (n as u64);
    if cfg.s > cells {
        return Err(Error::InvalidArgument(format!("s = {} exceeds n^2 = {cells}", cfg.s)));
    }
    let ring = &cfg.ring;
    let mut src = BitSource::new(cfg.seed);
    let (a, b) = match ring {
        RingSpec::Int { bound } => {
            let range = isqrt(bound / n as u64) as i128;
            if range == 0 {
                return Err(Error::MagnitudeOverflow(format!(
                    "int:{bound} cannot host products of size {n}: planted instances need M >= n"
                )));
            }
            let mut draw = |s: &mut BitSource| s.uniform_inclusive(-range, range);
            (random_matrix(ring, n, &mut src, &mut draw), random_matrix(ring, n, &mut src, &mut draw))
        }
        field => {
            let size = field.field_size().expect("field");
            let size = u64::try_from(size).expect("field sizes stay below 2^61");
            let mut draw = |s: &mut BitSource| field.nth_element(s.uniform_below(size) as u128);
            (random_matrix(ring, n, &mut src, &mut draw), random_matrix(ring, n, &mut src, &mut draw))
        }
    };
    let mut c = matmul(&a, &b)?;

    // Fisher-Yates prefix picks s distinct cells
    let mut cells_order: Vec<u64> = (0..cells).collect();
    for i in 0..cfg.s as usize {
        let j = i + src.uniform_below(cells - i as u64) as usize;
        cells_order.swap(i, j);
    }
    let d = ring.arith();
    for &cell in &cells_order[..cfg.s as usize] {
        let (i, j) = ((cell / n as u64) as usize, (cell % n as u64) as usize);
        let old = c.get(i, j);
        let new = match ring {
            RingSpec::Int { bound } => {
                let m = *bound as i128;
                let v = -m + src.uniform_below(2 * *bound) as i128;
                if v >= old {
                    v + 1
                } else {
                    v
                }
            }
            field => {
                let size = field.field_size().expect("field") as u64;
                let delta = field.nth_element(1 + src.uniform_below(size - 1) as u128);
                d.add(old, delta)
            }
        };
        c.set(i, j, new);
    }
    Instance::new(a, b, c, Some(cfg.s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::nnz;
    use crate::verify::verify_exact;

    fn cfg(ring: &str, n: usize, s: u64, seed: u64) -> PlantedConfig {
        PlantedConfig { n, ring: ring.parse().unwrap(), s, seed }
    }

    #[test]
    fn planted_sparsity_is_exact() {
        for ring in ["int:1024", "zmod:101", "zmod:2", "gf:2:3", "gf:3:2", "int:8"] {
            for seed in 0..20 {
                for s in [0, 1, 3, 8] {
                    let inst = gen_planted(&cfg(ring, 8, s, seed)).unwrap();
                    let diff = matmul(&inst.a, &inst.b).unwrap().sub(&inst.c).unwrap();
                    assert_eq!(nnz(&diff).nnz as u64, s, "{ring} seed {seed}");
                    assert_eq!(inst.promise_t, Some(s));
                }
            }
        }
    }

    #[test]
    fn examples() {
        let eq = gen_planted(&cfg("int:1024", 8, 0, 1)).unwrap();
        assert!(verify_exact(&eq).unwrap().is_equal());
        let ne = gen_planted(&cfg("int:1024", 8, 3, 1)).unwrap();
        assert!(!verify_exact(&ne).unwrap().is_equal());
        assert_eq!(gen_planted(&cfg("zmod:7", 5, 2, 9)).unwrap(), gen_planted(&cfg("zmod:7", 5, 2, 9)).unwrap());
        assert_ne!(gen_planted(&cfg("zmod:7", 5, 2, 9)).unwrap(), gen_planted(&cfg("zmod:7", 5, 2, 10)).unwrap());
    }

    #[test]
    fn int_entries_respect_bound() {
        let inst = gen_planted(&cfg("int:100", 16, 40, 3)).unwrap();
        for m in [&inst.a, &inst.b, &inst.c] {
            assert!(m.max_abs() <= 100);
        }
        assert!(matches!(gen_planted(&cfg("int:3", 8, 0, 0)), Err(Error::MagnitudeOverflow(_))));
        assert!(gen_planted(&cfg("int:100", 2, 5, 0)).is_err());
    }

    #[test]
    fn full_corruption() {
        let inst = gen_planted(&cfg("zmod:5", 3, 9, 4)).unwrap();
        let diff = matmul(&inst.a, &inst.b).unwrap().sub(&inst.c).unwrap();
        assert_eq!(nnz(&diff).nnz, 9);
    }
}
