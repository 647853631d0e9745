// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the arithmetic and sharing layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is composite")]
    CompositeModulus(String),
    #[error("modulus {0} is smaller than 3")]
    ModulusTooSmall(String),
    #[error("operands belong to different prime fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("0^0 is undefined")]
    UndefinedPower,
    #[error("two interpolation nodes share the x coordinate {0}")]
    DuplicateNode(String),
    #[error("expected {expected} values, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("threshold t={t} is invalid for m={m} participants (need 1 < t <= m)")]
    ThresholdInvalid { t: usize, m: usize },
    #[error("public key {0} appears more than once")]
    DuplicateKey(String),
    #[error("public key 0 is not allowed")]
    ZeroKey,
    #[error("{m} participants do not fit in a field of order {p}")]
    TooManyParticipants { m: usize, p: String },
    #[error("public key {0} is not registered")]
    UnknownKey(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("message component count k={k} must satisfy 1 < k <= t={t}")]
    MessageBitsInvalid { k: usize, t: usize },
    #[error("threshold t={t} must be at most m-1={max} for multisecret sharing")]
    ThresholdTooLarge { t: usize, max: usize },
    #[error("unknown one-way function variant `{0}`")]
    UnknownOneWay(String),
    #[error("invalid one-way function: {0}")]
    InvalidOneWay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
