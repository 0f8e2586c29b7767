//! Element arithmetic for each ring kind.
//!
//! Matrix kernels are generic over [`Arith`] and get monomorphised once per
//! ring kind through [`crate::with_arith!`]; [`Arithmetic`] is the dynamic
//! wrapper used for scalar work.

use crate::error::{Error, Result};
use crate::ring::prime::{mod_inverse, mul_mod};
use crate::ring::Element;

/// Largest extension degree representable by [`Gf`].
pub const MAX_DEGREE: usize = 40;

pub trait Arith: Send + Sync {
    fn add(&self, a: Element, b: Element) -> Element;
    fn sub(&self, a: Element, b: Element) -> Element;
    fn neg(&self, a: Element) -> Element;
    fn mul(&self, a: Element, b: Element) -> Element;
    fn inv(&self, a: Element) -> Result<Element>;
    /// Image of an integer under the canonical map `Z -> R`.
    fn from_int(&self, v: i128) -> Element;

    #[inline]
    fn mul_add(&self, acc: Element, a: Element, b: Element) -> Element {
        self.add(acc, self.mul(a, b))
    }

    fn pow(&self, base: Element, mut exp: u128) -> Element {
        let mut acc = self.from_int(1);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}

/// `Z_p` with residues in `[0, p)`.
#[derive(Clone, Copy, Debug)]
pub struct ZMod {
    p: u64,
}

impl ZMod {
    pub fn new(p: u64) -> Self {
        ZMod { p }
    }
}

impl Arith for ZMod {
    #[inline]
    fn add(&self, a: Element, b: Element) -> Element {
        let s = a + b;
        if s >= self.p as i128 {
            s - self.p as i128
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: Element, b: Element) -> Element {
        let d = a - b;
        if d < 0 {
            d + self.p as i128
        } else {
            d
        }
    }
    #[inline]
    fn neg(&self, a: Element) -> Element {
        if a == 0 {
            0
        } else {
            self.p as i128 - a
        }
    }
    #[inline]
    fn mul(&self, a: Element, b: Element) -> Element {
        mul_mod(a as u64, b as u64, self.p) as i128
    }
    #[inline]
    fn mul_add(&self, acc: Element, a: Element, b: Element) -> Element {
        // acc < 2^61 and a*b < 2^122, so the sum fits in u128
        ((acc as u128 + a as u128 * b as u128) % self.p as u128) as i128
    }
    fn inv(&self, a: Element) -> Result<Element> {
        mod_inverse(a, self.p)
    }
    fn from_int(&self, v: i128) -> Element {
        v.rem_euclid(self.p as i128)
    }
}

/// Signed integers in 127-bit two's complement. Debug builds check every
/// operation for overflow; callers run an admissibility bound up front.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl Arith for Integers {
    #[inline]
    fn add(&self, a: Element, b: Element) -> Element {
        if cfg!(debug_assertions) {
            a.checked_add(b).expect("integer accumulate exceeded 127 bits")
        } else {
            a.wrapping_add(b)
        }
    }
    #[inline]
    fn sub(&self, a: Element, b: Element) -> Element {
        if cfg!(debug_assertions) {
            a.checked_sub(b).expect("integer accumulate exceeded 127 bits")
        } else {
            a.wrapping_sub(b)
        }
    }
    #[inline]
    fn neg(&self, a: Element) -> Element {
        -a
    }
    #[inline]
    fn mul(&self, a: Element, b: Element) -> Element {
        if cfg!(debug_assertions) {
            a.checked_mul(b).expect("integer product exceeded 127 bits")
        } else {
            a.wrapping_mul(b)
        }
    }
    fn inv(&self, a: Element) -> Result<Element> {
        match a {
            1 | -1 => Ok(a),
            _ => Err(Error::NotInvertible(a)),
        }
    }
    fn from_int(&self, v: i128) -> Element {
        v
    }
}

/// `GF(p^e)` with elements packed as `sum c_i << (i * width)`, where `width`
/// is the bit length of `p - 1`. Constants `c_0` therefore keep their `Z_p`
/// value, so `Z_p` embeds into the extension without re-encoding.
#[derive(Clone, Debug)]
pub struct Gf {
    p: u64,
    degree: usize,
    width: u32,
    mask: u64,
    // lowest degree first, monic, length degree + 1
    modulus: Vec<u64>,
    order: u128,
}

impl Gf {
    pub fn new(p: u64, modulus: &[u64]) -> Self {
        let degree = modulus.len() - 1;
        assert!((1..=MAX_DEGREE).contains(&degree));
        let width = slot_width(p);
        Gf {
            p,
            degree,
            width,
            mask: (1u64 << width) - 1,
            modulus: modulus.to_vec(),
            order: (p as u128).pow(degree as u32),
        }
    }

    #[inline]
    fn decode(&self, a: Element, out: &mut [u64; MAX_DEGREE]) {
        let mut v = a as u128;
        for c in out.iter_mut().take(self.degree) {
            *c = (v as u64) & self.mask;
            v >>= self.width;
        }
    }

    #[inline]
    fn encode(&self, c: &[u64]) -> Element {
        let mut v: u128 = 0;
        for &x in c[..self.degree].iter().rev() {
            v = (v << self.width) | x as u128;
        }
        v as i128
    }

    fn slotwise(&self, a: Element, b: Element, f: impl Fn(u64, u64) -> u64) -> Element {
        let mut x = [0u64; MAX_DEGREE];
        let mut y = [0u64; MAX_DEGREE];
        self.decode(a, &mut x);
        self.decode(b, &mut y);
        for i in 0..self.degree {
            x[i] = f(x[i], y[i]);
        }
        self.encode(&x)
    }
}

pub(crate) fn slot_width(p: u64) -> u32 {
    (64 - (p - 1).leading_zeros()).max(1)
}

impl Arith for Gf {
    fn add(&self, a: Element, b: Element) -> Element {
        let p = self.p;
        self.slotwise(a, b, |x, y| {
            let s = x + y;
            if s >= p {
                s - p
            } else {
                s
            }
        })
    }
    fn sub(&self, a: Element, b: Element) -> Element {
        let p = self.p;
        self.slotwise(a, b, |x, y| if x >= y { x - y } else { x + p - y })
    }
    fn neg(&self, a: Element) -> Element {
        self.sub(0, a)
    }
    fn mul(&self, a: Element, b: Element) -> Element {
        let e = self.degree;
        let p = self.p;
        let mut x = [0u64; MAX_DEGREE];
        let mut y = [0u64; MAX_DEGREE];
        self.decode(a, &mut x);
        self.decode(b, &mut y);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..e {
            if x[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + mul_mod(x[i], y[j], p)) % p;
            }
        }
        // reduce by the monic modulus from the top degree down
        for d in (e..2 * e - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..e {
                let t = mul_mod(c, self.modulus[i], p);
                let k = d - e + i;
                prod[k] = (prod[k] + p - t) % p;
            }
        }
        self.encode(&prod[..e])
    }
    fn inv(&self, a: Element) -> Result<Element> {
        if a == 0 {
            return Err(Error::NotInvertible(a));
        }
        Ok(self.pow(a, self.order - 2))
    }
    fn from_int(&self, v: i128) -> Element {
        v.rem_euclid(self.p as i128)
    }
}

/// Runtime-selected arithmetic.
#[derive(Clone, Debug)]
pub enum Arithmetic {
    ZMod(ZMod),
    Gf(Gf),
    Int(Integers),
}

macro_rules! delegate {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Arithmetic::ZMod($d) => $e,
            Arithmetic::Gf($d) => $e,
            Arithmetic::Int($d) => $e,
        }
    };
}

impl Arith for Arithmetic {
    fn add(&self, a: Element, b: Element) -> Element {
        delegate!(self, d => d.add(a, b))
    }
    fn sub(&self, a: Element, b: Element) -> Element {
        delegate!(self, d => d.sub(a, b))
    }
    fn neg(&self, a: Element) -> Element {
        delegate!(self, d => d.neg(a))
    }
    fn mul(&self, a: Element, b: Element) -> Element {
        delegate!(self, d => d.mul(a, b))
    }
    fn mul_add(&self, acc: Element, a: Element, b: Element) -> Element {
        delegate!(self, d => d.mul_add(acc, a, b))
    }
    fn inv(&self, a: Element) -> Result<Element> {
        delegate!(self, d => d.inv(a))
    }
    fn from_int(&self, v: i128) -> Element {
        delegate!(self, d => d.from_int(v))
    }
}

/// Runs `$body` with `$d` bound to the concrete arithmetic of `$ring`
/// (a `&RingSpec`), so generic kernels are monomorphised per ring kind.
#[macro_export]
macro_rules! with_arith {
    ($ring:expr, |$d:ident| $body:expr) => {
        match $ring.arith() {
            $crate::ring::Arithmetic::ZMod(ref $d) => $body,
            $crate::ring::Arithmetic::Gf(ref $d) => $body,
            $crate::ring::Arithmetic::Int(ref $d) => $body,
        }
    };
}
