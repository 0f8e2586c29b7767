//! Arithmetic domains: prime fields, extension fields and bounded integers.
//!
//! Every ring element is stored as an [`Element`] (`i128`):
//!
//! * `Z_p`: the residue in `[0, p)`;
//! * `GF(p^e)`: coefficients `c_0..c_{e-1}` packed into fixed-width bit slots,
//!   `c_0` in the lowest slot (so base-field constants keep their value);
//! * integers: the value itself.

mod arith;
pub mod poly;
pub mod prime;

use std::fmt;
use std::str::FromStr;

pub use arith::{Arith, Arithmetic, Gf, Integers, ZMod, MAX_DEGREE};
pub use prime::{element_of_order_at_least, find_prime_in, is_prime, mod_inverse, primitive_element};

use crate::error::{Error, Result};

pub type Element = i128;

/// Upper bound on `p^e` for constructed extension fields.
pub const EXTENSION_CAP: u128 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    PrimeField {
        p: u64,
    },
    ExtField {
        p: u64,
        degree: u32,
        /// Monic irreducible modulus, lowest degree first (length `degree + 1`).
        modulus: Vec<u64>,
    },
    Int {
        /// Magnitude bound `M` on instance entries.
        bound: u64,
    },
}

impl RingSpec {
    pub fn zmod(p: u64) -> Result<Self> {
        if p >= prime::PRIME_LIMIT || !is_prime(p) {
            return Err(Error::InvalidRing(format!("zmod:{p}")));
        }
        Ok(RingSpec::PrimeField { p })
    }

    /// `GF(p^e)` with the lexicographically first irreducible modulus.
    pub fn gf(p: u64, e: u32) -> Result<Self> {
        if p >= prime::PRIME_LIMIT || !is_prime(p) || e == 0 {
            return Err(Error::InvalidRing(format!("gf:{p}:{e}")));
        }
        check_extension_size(p, e)?;
        let modulus = poly::first_irreducible(p, e as usize);
        Ok(RingSpec::ExtField { p, degree: e, modulus })
    }

    /// `GF(p^e)` with a caller-chosen modulus, certified irreducible.
    pub fn gf_with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err(Error::InvalidRing(format!("gf:{p} with modulus {modulus:?}")));
        }
        let e = (modulus.len() - 1) as u32;
        check_extension_size(p, e)?;
        if modulus.iter().any(|&c| c >= p) || !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidRing(format!("modulus {modulus:?} is not irreducible over Z_{p}")));
        }
        Ok(RingSpec::ExtField { p, degree: e, modulus })
    }

    pub fn int(bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::InvalidRing("int:0".into()));
        }
        Ok(RingSpec::Int { bound })
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, RingSpec::Int { .. })
    }

    pub fn characteristic(&self) -> Option<u64> {
        match self {
            RingSpec::PrimeField { p } | RingSpec::ExtField { p, .. } => Some(*p),
            RingSpec::Int { .. } => None,
        }
    }

    /// Number of field elements; `None` for the integers.
    pub fn field_size(&self) -> Option<u128> {
        match self {
            RingSpec::PrimeField { p } => Some(*p as u128),
            RingSpec::ExtField { p, degree, .. } => Some((*p as u128).pow(*degree)),
            RingSpec::Int { .. } => None,
        }
    }

    pub fn int_bound(&self) -> Option<u64> {
        match self {
            RingSpec::Int { bound } => Some(*bound),
            _ => None,
        }
    }

    pub fn arith(&self) -> Arithmetic {
        match self {
            RingSpec::PrimeField { p } => Arithmetic::ZMod(ZMod::new(*p)),
            RingSpec::ExtField { p, modulus, .. } => Arithmetic::Gf(Gf::new(*p, modulus)),
            RingSpec::Int { .. } => Arithmetic::Int(Integers),
        }
    }

    /// The `index`-th field element in canonical order: `0, 1, ..., p - 1`
    /// and then extension elements in lexicographic coefficient order
    /// (highest coefficient most significant).
    pub fn nth_element(&self, index: u128) -> Element {
        match self {
            RingSpec::PrimeField { .. } => index as Element,
            RingSpec::ExtField { p, degree, .. } => {
                let mut digits = Vec::with_capacity(*degree as usize);
                let mut k = index;
                for _ in 0..*degree {
                    digits.push((k % *p as u128) as u64);
                    k /= *p as u128;
                }
                self.from_coeffs(&digits)
            }
            RingSpec::Int { .. } => index as Element,
        }
    }

    /// Coefficients `c_0..c_{e-1}` of an extension element (a single residue
    /// for `Z_p`, the value itself for integers).
    pub fn coeffs(&self, x: Element) -> Vec<i128> {
        match self {
            RingSpec::ExtField { p, degree, .. } => {
                let w = arith::slot_width(*p);
                let mask = (1u128 << w) - 1;
                (0..*degree).map(|i| ((x as u128 >> (i * w)) & mask) as i128).collect()
            }
            _ => vec![x],
        }
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Element {
        match self {
            RingSpec::ExtField { p, .. } => {
                let w = arith::slot_width(*p);
                c.iter().rev().fold(0u128, |acc, &x| (acc << w) | x as u128) as Element
            }
            _ => c.first().copied().unwrap_or(0) as Element,
        }
    }

    /// Whether `x` is a canonical representative. Integers accept any value;
    /// the magnitude bound is an instance-level constraint.
    pub fn is_canonical(&self, x: Element) -> bool {
        match self {
            RingSpec::PrimeField { p } => (0..*p as i128).contains(&x),
            RingSpec::ExtField { p, degree, .. } => {
                let w = arith::slot_width(*p);
                x >= 0 && (x as u128) >> (w * degree) == 0 && self.coeffs(x).iter().all(|&c| c < *p as i128)
            }
            RingSpec::Int { .. } => true,
        }
    }

    pub fn format_element(&self, x: Element) -> String {
        match self {
            RingSpec::ExtField { .. } => self.coeffs(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":"),
            _ => x.to_string(),
        }
    }

    /// Parses a canonical value token (colon-joined coefficients for
    /// extension fields, lowest degree first).
    pub fn parse_element(&self, s: &str) -> std::result::Result<Element, String> {
        match self {
            RingSpec::ExtField { p, degree, .. } => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() != *degree as usize {
                    return Err(format!("expected {degree} coefficients, got `{s}`"));
                }
                let mut c = Vec::with_capacity(parts.len());
                for part in parts {
                    let v: u64 = part.parse().map_err(|_| format!("bad coefficient `{part}`"))?;
                    if v >= *p {
                        return Err(format!("coefficient {v} is not reduced mod {p}"));
                    }
                    c.push(v);
                }
                Ok(self.from_coeffs(&c))
            }
            RingSpec::PrimeField { p } => {
                let v: i128 = s.parse().map_err(|_| format!("bad value `{s}`"))?;
                if !(0..*p as i128).contains(&v) {
                    return Err(format!("{v} is not a canonical residue mod {p}"));
                }
                Ok(v)
            }
            RingSpec::Int { bound } => {
                let v: i128 = s.parse().map_err(|_| format!("bad value `{s}`"))?;
                if v.unsigned_abs() > *bound as u128 {
                    return Err(format!("|{v}| exceeds the bound {bound}"));
                }
                Ok(v)
            }
        }
    }
}

fn check_extension_size(p: u64, e: u32) -> Result<()> {
    let size = (p as u128).checked_pow(e);
    match size {
        Some(s) if s <= EXTENSION_CAP && (e as usize) <= MAX_DEGREE => Ok(()),
        _ if e == 1 => Ok(()),
        _ => Err(Error::TooLarge(format!("{p}^{e} exceeds 2^40"))),
    }
}

/// Smallest field `GF(p^e)` with `p^e >= min_size`, with the
/// lexicographically first irreducible modulus of that degree.
pub fn build_extension(p: u64, min_size: u128) -> Result<RingSpec> {
    if !is_prime(p) || p >= prime::PRIME_LIMIT {
        return Err(Error::InvalidArgument(format!("{p} is not a supported prime")));
    }
    if min_size < 2 {
        return Err(Error::InvalidArgument("min_size must be at least 2".into()));
    }
    let mut e = 1u32;
    let mut size = p as u128;
    while size < min_size {
        e += 1;
        size = size
            .checked_mul(p as u128)
            .filter(|&s| s <= EXTENSION_CAP)
            .ok_or_else(|| Error::TooLarge(format!("no {p}^e >= {min_size} within 2^40")))?;
    }
    RingSpec::gf(p, e)
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::PrimeField { p } => write!(f, "zmod:{p}"),
            RingSpec::ExtField { p, degree, .. } => write!(f, "gf:{p}:{degree}"),
            RingSpec::Int { bound } => write!(f, "int:{bound}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRing(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            ["zmod", p] => RingSpec::zmod(num(p)?),
            ["gf", p, e] => RingSpec::gf(num(p)?, num(e)?.try_into().map_err(|_| bad())?),
            ["int", m] => RingSpec::int(num(m)?),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    #[test]
    fn tokens_round_trip() {
        for tok in ["zmod:7", "gf:2:3", "gf:3:1", "int:1024"] {
            let r: RingSpec = tok.parse().unwrap();
            assert_eq!(r.to_string(), tok);
        }
        for bad in ["zmod:8", "gf:4:2", "int:0", "int", "zmod:x", "gf:2:0", "gf:2:64"] {
            assert!(bad.parse::<RingSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn build_extension_examples() {
        let r = build_extension(2, 8).unwrap();
        assert_eq!(r, RingSpec::ExtField { p: 2, degree: 3, modulus: vec![1, 1, 0, 1] });
        let r = build_extension(7, 7).unwrap();
        assert_eq!(r, RingSpec::ExtField { p: 7, degree: 1, modulus: vec![0, 1] });
        match build_extension(3, 10).unwrap() {
            RingSpec::ExtField { degree, .. } => assert_eq!(degree, 3),
            other => panic!("{other}"),
        }
        assert!(matches!(build_extension(2, 1 << 50), Err(Error::TooLarge(_))));
    }

    #[test]
    fn build_extension_is_deterministic() {
        for (p, m) in [(2u64, 1000u128), (3, 500), (5, 200), (13, 10_000)] {
            assert_eq!(build_extension(p, m).unwrap(), build_extension(p, m).unwrap());
        }
    }

    #[test]
    fn canonical_enumeration_starts_with_base_field() {
        let r = RingSpec::gf(3, 2).unwrap();
        for k in 0..3u128 {
            assert_eq!(r.nth_element(k), k as i128);
        }
        // 3 = 0 + 1*x
        assert_eq!(r.coeffs(r.nth_element(3)), vec![0, 1]);
        let all: std::collections::HashSet<_> = (0..9).map(|k| r.nth_element(k)).collect();
        assert_eq!(all.len(), 9);
    }

    #[test]
    fn element_text_round_trip() {
        let r = RingSpec::gf(5, 3).unwrap();
        for k in 0..125 {
            let x = r.nth_element(k);
            assert!(r.is_canonical(x));
            assert_eq!(r.parse_element(&r.format_element(x)), Ok(x));
        }
        assert!(r.parse_element("1:2").is_err());
        assert!(r.parse_element("1:2:5").is_err());
        let z7 = RingSpec::zmod(7).unwrap();
        assert!(z7.parse_element("9").is_err());
        let i = RingSpec::int(5).unwrap();
        assert_eq!(i.parse_element("-5"), Ok(-5));
        assert!(i.parse_element("6").is_err());
    }

    fn random_field_element(r: &RingSpec, rng: &mut ChaCha8Rng) -> Element {
        let q = r.field_size().unwrap();
        r.nth_element(rng.next_u64() as u128 % q)
    }

    fn field_axioms(r: &RingSpec) {
        let a = r.arith();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = random_field_element(r, &mut rng);
            let y = random_field_element(r, &mut rng);
            let z = random_field_element(r, &mut rng);
            assert_eq!(a.add(a.add(x, y), z), a.add(x, a.add(y, z)));
            assert_eq!(a.mul(a.mul(x, y), z), a.mul(x, a.mul(y, z)));
            assert_eq!(a.mul(x, a.add(y, z)), a.add(a.mul(x, y), a.mul(x, z)));
            assert_eq!(a.sub(a.add(x, y), y), x);
            assert_eq!(a.add(x, a.neg(x)), 0);
            assert_eq!(a.mul_add(z, x, y), a.add(z, a.mul(x, y)));
            if x != 0 {
                assert_eq!(a.mul(x, a.inv(x).unwrap()), 1);
            }
            assert!(r.is_canonical(a.mul(x, y)));
        }
    }

    #[test]
    fn prime_field_axioms() {
        for p in [2u64, 7, 101, 65_521, (1 << 61) - 1] {
            field_axioms(&RingSpec::zmod(p).unwrap());
        }
    }

    #[test]
    fn extension_field_axioms() {
        for (p, e) in [(2u64, 1u32), (2, 3), (2, 8), (3, 4), (7, 2), (101, 2), (2, 40)] {
            field_axioms(&RingSpec::gf(p, e).unwrap());
        }
    }

    #[test]
    fn extension_multiplicative_group_is_cyclic_of_right_order() {
        // x^(q-1) = 1 for every non-zero x
        let r = RingSpec::gf(2, 4).unwrap();
        let a = r.arith();
        for k in 1..16 {
            assert_eq!(a.pow(r.nth_element(k), 15), 1);
        }
    }

    #[test]
    fn integer_arithmetic_is_exact() {
        let a = Integers;
        assert_eq!(a.mul_add(5, -3, 4), -7);
        assert_eq!(a.inv(-1), Ok(-1));
        assert!(a.inv(2).is_err());
    }

    #[test]
    #[should_panic(expected = "127 bits")]
    fn integer_overflow_is_caught_in_debug() {
        if !cfg!(debug_assertions) {
            panic!("127 bits (release build, check skipped)");
        }
        Integers.mul(i128::MAX / 2, 3);
    }
}
