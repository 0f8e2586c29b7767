//! Metered pseudorandom bits.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A seeded bit stream that counts every bit it hands out.
///
/// Bits are taken from 64-bit ChaCha8 words, least significant first, so
/// the stream depends only on the seed and never on how callers group
/// their requests.
#[derive(Clone, Debug)]
pub struct BitSource {
    seed: u64,
    rng: ChaCha8Rng,
    word: u64,
    available: u32,
    counter: u64,
    meter: u64,
}

impl BitSource {
    pub fn new(seed: u64) -> Self {
        BitSource { seed, rng: ChaCha8Rng::seed_from_u64(seed), word: 0, available: 0, counter: 0, meter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws (calls to [`BitSource::next_bits`]) so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }

    /// Total number of bits handed out.
    pub fn bits_consumed(&self) -> u64 {
        self.meter
    }

    fn next_raw_bit(&mut self) -> u64 {
        if self.available == 0 {
            self.word = self.rng.next_u64();
            self.available = 64;
        }
        let b = self.word & 1;
        self.word >>= 1;
        self.available -= 1;
        b
    }

    /// The next `k <= 64` bits as an integer, first bit least significant.
    pub fn next_bits(&mut self, k: u32) -> u64 {
        assert!(k <= 64, "at most 64 bits per draw");
        self.counter += 1;
        self.meter += k as u64;
        (0..k).fold(0, |acc, i| acc | (self.next_raw_bit() << i))
    }

    pub fn next_bit(&mut self) -> bool {
        self.next_bits(1) == 1
    }

    /// Uniform value in `[0, bound)` by rejection on `ceil(log2 bound)`-bit
    /// draws. Every draw, accepted or not, is metered.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let bits = bits_for(bound);
        loop {
            let v = self.next_bits(bits);
            if v < bound {
                return v;
            }
        }
    }

    /// Uniform value in `[lo, hi]`.
    pub fn uniform_inclusive(&mut self, lo: i128, hi: i128) -> i128 {
        assert!(lo <= hi);
        let span = (hi - lo) as u128 + 1;
        assert!(span <= u64::MAX as u128, "range too wide");
        lo + self.uniform_below(span as u64) as i128
    }
}

/// `ceil(log2 bound)`: the number of bits that index `bound` outcomes.
pub fn bits_for(bound: u64) -> u32 {
    if bound <= 1 {
        0
    } else {
        64 - (bound - 1).leading_zeros()
    }
}

/// Bijective 64-bit mixer (the SplitMix64 output function applied to
/// `x + 0x9E3779B97F4A7C15`).
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`: `master ^ mix64(index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    master ^ mix64(index)
}
