//! Dense lattices with a prescribed automorphism group.
//!
//! The pipeline runs from double circulant codes over a prime field `F_p`
//! to lattice packings of `R^n` (Construction A), with exact counting of the
//! quantities that control the first-moment argument and a search harness
//! over all codes of a given length.
//!
//! Module map:
//!
//! * [`modp`]: centered arithmetic mod `p` and the Euclidean norm on `F_p^n`.
//! * [`cyclic`]: the ring `F_p[Z]/(Z^q - 1)` and its cyclic codes.
//! * [`primes`]: choosing `p` so that `p mod q` is a primitive root.
//! * [`group`]: the action of `Z/2 x Z/q` and orbit censuses.
//! * [`dcode`]: double circulant codes, syndromes and minimum norms.
//! * [`counting`]: exact ball and type-1/type-2 counts, first-moment bounds.
//! * [`lattice`]: Construction A bases, shortest vectors and densities.
//! * [`harness`]: code searches, lemma suites and JSON reports.
//! * [`strategy`]: name-keyed registries of interchangeable algorithms.

pub mod counting;
pub mod cyclic;
pub mod dcode;
mod error;
mod json;
pub mod group;
pub mod harness;
pub mod lattice;
pub mod modp;
pub mod primes;
pub mod strategy;

pub use error::{Error, Result};
pub use modp::{FpVector, Params};

/// Default cap on exhaustive enumerations (codes, words or ball points).
pub const DEFAULT_BUDGET: u64 = 100_000_000;
