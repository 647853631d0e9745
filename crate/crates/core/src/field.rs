// SPDX-License-Identifier: Apache-2.0

//! Prime field arithmetic over arbitrary-precision integers.
//!
//! A [`PrimeField`] is a cheap, cloneable handle to a verified prime modulus.
//! [`FieldElement`]s carry their field with them and always hold the
//! canonical representative in `[0, p)`. The `checked_*` methods report a
//! [`Error::FieldMismatch`] when operands come from different fields; the
//! operator impls panic in that case and are meant for code that has
//! already validated its inputs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1 << 32;
const MILLER_RABIN_ROUNDS: usize = 40;

/// A prime field `F_p`.
#[derive(Clone)]
pub struct PrimeField {
    modulus: Arc<BigUint>,
}

impl PrimeField {
    /// Builds `F_p`, rejecting composite moduli and `p < 3`.
    pub fn new(p: impl Into<BigUint>) -> Result<Self> {
        let p = p.into();
        if p < BigUint::from(3u32) {
            return Err(Error::ModulusTooSmall(p.to_string()));
        }
        if !is_prime(&p) {
            return Err(Error::CompositeModulus(p.to_string()));
        }
        Ok(PrimeField {
            modulus: Arc::new(p),
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// The element with integer representative `value mod p`.
    pub fn element(&self, value: impl Into<BigUint>) -> FieldElement {
        FieldElement {
            value: value.into() % &*self.modulus,
            field: self.clone(),
        }
    }

    /// Reduces a signed integer into the field.
    pub fn element_i64(&self, value: i64) -> FieldElement {
        let magnitude = self.element(value.unsigned_abs());
        if value < 0 {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0u32)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1u32)
    }

    /// A uniformly random element of the field.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement {
            value: rng.gen_biguint_below(&self.modulus),
            field: self.clone(),
        }
    }

    /// A uniformly random element of `F_p^*`.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let upper = &*self.modulus - 1u32;
        FieldElement {
            value: rng.gen_biguint_below(&upper) + 1u32,
            field: self.clone(),
        }
    }

    /// Number of bytes needed to hold any element.
    pub fn byte_len(&self) -> usize {
        self.modulus.bits().div_ceil(8) as usize
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus == other.modulus
    }
}

impl Eq for PrimeField {}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.modulus)
    }
}

/// An element of a [`PrimeField`], always in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: BigUint,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The representative as a `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn ensure_same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ensure_same_field(other)?;
        Ok(self.add_raw(other))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ensure_same_field(other)?;
        Ok(self.sub_raw(other))
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ensure_same_field(other)?;
        Ok(self.mul_raw(other))
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let exponent = self.field.modulus() - 2u32;
        Ok(self.with_value(self.value.modpow(&exponent, self.field.modulus())))
    }

    /// `self^exponent` by square-and-multiply. `0^0` is an error.
    pub fn pow(&self, exponent: &BigUint) -> Result<FieldElement> {
        if self.is_zero() && exponent.is_zero() {
            return Err(Error::UndefinedPower);
        }
        let modulus = self.field.modulus();
        let mut result = BigUint::one();
        let mut base = self.value.clone();
        for i in 0..exponent.bits() {
            if exponent.bit(i) {
                result = (result * &base) % modulus;
            }
            base = (&base * &base) % modulus;
        }
        Ok(self.with_value(result))
    }

    pub fn pow_u64(&self, exponent: u64) -> Result<FieldElement> {
        self.pow(&BigUint::from(exponent))
    }

    /// Minimal big-endian encoding of the representative (`[0]` for zero).
    pub fn to_bytes_be(&self) -> Vec<u8> {
        self.value.to_bytes_be()
    }

    fn with_value(&self, value: BigUint) -> FieldElement {
        FieldElement {
            value,
            field: self.field.clone(),
        }
    }

    fn add_raw(&self, other: &FieldElement) -> FieldElement {
        let sum = &self.value + &other.value;
        let modulus = self.field.modulus();
        let value = if &sum >= modulus { sum - modulus } else { sum };
        self.with_value(value)
    }

    fn sub_raw(&self, other: &FieldElement) -> FieldElement {
        let value = if self.value >= other.value {
            &self.value - &other.value
        } else {
            self.field.modulus() - &other.value + &self.value
        };
        self.with_value(value)
    }

    fn mul_raw(&self, other: &FieldElement) -> FieldElement {
        self.with_value((&self.value * &other.value) % self.field.modulus())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.modulus())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $raw:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: &FieldElement) -> FieldElement {
                assert!(self.field == rhs.field, "field mismatch in arithmetic");
                self.$raw(rhs)
            }
        }

        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

impl_binop!(Add, add, add_raw);
impl_binop!(Sub, sub, sub_raw);
impl_binop!(Mul, mul, mul_raw);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        self.field.zero().sub_raw(&self)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        self.field.zero().sub_raw(self)
    }
}

/// Primality test: trial division below 2^32, Miller-Rabin with the first
/// 40 primes as witnesses above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_LIMIT {
            return is_prime_trial(small);
        }
    }
    if n.is_even() {
        return false;
    }
    for &q in SMALL_PRIMES.iter() {
        if (n % q).is_zero() {
            return false;
        }
    }
    miller_rabin(n, &SMALL_PRIMES[..MILLER_RABIN_ROUNDS])
}

fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

fn miller_rabin(n: &BigUint, witnesses: &[u32]) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> shift;

    'witness: for &a in witnesses {
        let mut x = BigUint::from(a).modpow(&odd, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const SMALL_PRIMES: [u32; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];
