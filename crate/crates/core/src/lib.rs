//! Matrix multiplication verification: decide whether `AB = C` over prime
//! fields, extension fields and bounded integers.
//!
//! The crate bundles
//!
//! * arithmetic domains and prime/irreducible search ([`ring`]),
//! * dense matrices with a cache-blocked classical product ([`matrix`]),
//! * Vandermonde parity checks and Cauchy super-regular matrices ([`codes`]),
//! * exact, randomized and sparse-difference verifiers ([`verify`]),
//! * answer-preserving reductions between verification variants ([`reduce`]),
//! * instance generation, the text file format, benchmarks and the CLI
//!   ([`harness`]).

pub mod codes;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod reduce;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use ring::{Element, RingSpec};
