// SPDX-License-Identifier: Apache-2.0

//! Two-level threshold secret sharing over prime fields.
//!
//! A dealer splits a secret with a polynomial `f` and publishes shares of
//! `h`, the coefficient-wise image of `f` under a one-way function. Shares
//! of `f` are released only to a coalition of at least `t` participants who
//! first reconstruct `h` and present its constant term. The multisecret
//! variant packs a vector secret into the coefficients of `f`.
//!
//! On top of the schemes sit a deterministic protocol simulator
//! ([`protocol`]) and a consortium chain whose blocks are validated by
//! threshold recovery of a block secret ([`chain`]).

pub mod chain;
pub mod error;
pub mod field;
pub mod mss;
pub mod oneway;
pub mod poly;
pub mod protocol;
pub mod sss;

pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField};
pub use oneway::{OneWayFn, OneWayKind};
pub use poly::{lagrange_interpolate, EvalPoint, Polynomial};

/// The seedable generator used throughout for reproducible runs.
pub type SeededRng = rand_chacha::ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
