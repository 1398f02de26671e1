//! PIR array codes: explicit constructions with matching-based witnesses,
//! exact verification over prime fields, and rate bounds in exact rational
//! arithmetic.
//!
//! A `[t × m, p]` array code stores `p` items on `m` servers with `t` cells
//! each; it is k-PIR when every item can be recovered from `k` pairwise
//! disjoint sets of servers.

pub mod bounds;
pub mod code;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod format;
pub mod gf;
pub mod matching;
pub mod rational;
pub mod verifier;

pub use code::{ArrayCode, Server, ServerKind, Violation, Witness};
pub use error::{Error, Result};
pub use gf::{CoeffVector, PrimeField};
pub use rational::Rational;
pub use verifier::{brute_force_k, max_k, spans, verify_witness, VerificationReport};
