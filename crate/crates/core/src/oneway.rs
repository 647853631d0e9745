// SPDX-License-Identifier: Apache-2.0

//! One-way functions `H: F_p -> F_p`, applied coefficient-wise to turn the
//! secret polynomial `f` into its public image `h`.
//!
//! `ModSquare` is kept only to reproduce small worked examples: square
//! roots mod p are easy to compute, so it offers no one-wayness. Use
//! `Sha256` (or `ModExp` over a large prime) for anything else.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneWayKind {
    /// `n -> g^n mod p`
    ModExp(BigUint),
    /// `n -> n^2 mod p`
    ModSquare,
    /// `n -> SHA-256(big-endian bytes of n) mod p`
    Sha256,
}

impl fmt::Display for OneWayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OneWayKind::ModExp(g) => write!(f, "modexp:{g}"),
            OneWayKind::ModSquare => f.write_str("modsquare"),
            OneWayKind::Sha256 => f.write_str("sha256"),
        }
    }
}

impl FromStr for OneWayKind {
    type Err = Error;

    /// Parses `modexp:<g>`, `modsquare` or `sha256`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "modsquare" => Ok(OneWayKind::ModSquare),
            "sha256" => Ok(OneWayKind::Sha256),
            other => {
                let g = other
                    .strip_prefix("modexp:")
                    .ok_or_else(|| Error::UnknownOneWay(other.to_string()))?;
                let g = BigUint::parse_bytes(g.trim().as_bytes(), 10)
                    .ok_or_else(|| Error::InvalidOneWay(format!("bad generator `{g}`")))?;
                Ok(OneWayKind::ModExp(g))
            }
        }
    }
}

/// A one-way function bound to a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneWayFn {
    kind: OneWayKind,
    field: PrimeField,
}

impl OneWayFn {
    pub fn new(kind: OneWayKind, field: &PrimeField) -> Result<Self> {
        if let OneWayKind::ModExp(g) = &kind {
            if field.element(g.clone()).is_zero() {
                return Err(Error::InvalidOneWay(
                    "generator must be nonzero mod p".to_string(),
                ));
            }
        }
        Ok(OneWayFn {
            kind,
            field: field.clone(),
        })
    }

    pub fn mod_exp(field: &PrimeField, generator: u64) -> Result<Self> {
        Self::new(OneWayKind::ModExp(BigUint::from(generator)), field)
    }

    pub fn mod_square(field: &PrimeField) -> Self {
        OneWayFn {
            kind: OneWayKind::ModSquare,
            field: field.clone(),
        }
    }

    pub fn sha256(field: &PrimeField) -> Self {
        OneWayFn {
            kind: OneWayKind::Sha256,
            field: field.clone(),
        }
    }

    pub fn kind(&self) -> &OneWayKind {
        &self.kind
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(match &self.kind {
            // exponent is the integer representative, never zero base
            OneWayKind::ModExp(g) => self.field.element(g.clone()).pow(x.value())?,
            OneWayKind::ModSquare => x * x,
            OneWayKind::Sha256 => {
                let digest = Sha256::digest(x.to_bytes_be());
                self.field.element(BigUint::from_bytes_be(&digest))
            }
        })
    }

    /// Applies `H` to every coefficient of `poly`.
    pub fn lift(&self, poly: &Polynomial) -> Result<Polynomial> {
        self.lift_coeffs(poly.coeffs())
    }

    pub fn lift_coeffs(&self, coeffs: &[FieldElement]) -> Result<Polynomial> {
        if coeffs.is_empty() {
            return Err(Error::WrongCount {
                expected: 1,
                got: 0,
            });
        }
        let lifted = coeffs
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Polynomial::from_coeffs(lifted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn example_values() {
        let f199 = PrimeField::new(199u32).unwrap();
        let h = OneWayFn::mod_exp(&f199, 3).unwrap();
        assert_eq!(h.apply(&f199.element(95u32)).unwrap(), f199.element(113u32));
        assert_eq!(h.apply(&f199.zero()).unwrap(), f199.one());

        let f113 = PrimeField::new(113u32).unwrap();
        let sq = OneWayFn::mod_square(&f113);
        assert_eq!(sq.apply(&f113.element(76u32)).unwrap(), f113.element(13u32));
    }

    #[test]
    fn lifts_example_polynomials() {
        let f199 = PrimeField::new(199u32).unwrap();
        let h = OneWayFn::mod_exp(&f199, 3).unwrap();
        let f = Polynomial::from_u64s(&f199, &[90, 88, 95, 94, 90]).unwrap();
        assert_eq!(h.lift(&f).unwrap().to_u64s(), vec![188, 43, 113, 104, 188]);

        let f113 = PrimeField::new(113u32).unwrap();
        let sq = OneWayFn::mod_square(&f113);
        let f = Polynomial::from_u64s(&f113, &[82, 80, 78, 76, 74, 82, 80, 79, 83]).unwrap();
        assert_eq!(
            sq.lift(&f).unwrap().to_u64s(),
            vec![57, 72, 95, 13, 52, 57, 72, 26, 109]
        );
        assert_eq!(
            sq.lift_coeffs(&[]),
            Err(Error::WrongCount {
                expected: 1,
                got: 0
            })
        );
    }

    #[test]
    fn sha256_variant_is_stable() {
        let f = PrimeField::new(199u32).unwrap();
        let h = OneWayFn::sha256(&f);
        let x = f.element(42u32);
        // SHA-256 of the single byte 0x2a, reduced mod 199.
        let digest = Sha256::digest([42u8]);
        let expected = f.element(BigUint::from_bytes_be(&digest));
        assert_eq!(h.apply(&x).unwrap(), expected);
        assert_eq!(h.apply(&x).unwrap(), h.apply(&x).unwrap());
    }

    #[test]
    fn parse_variants() {
        assert_eq!(
            "modsquare".parse::<OneWayKind>().unwrap(),
            OneWayKind::ModSquare
        );
        assert_eq!("sha256".parse::<OneWayKind>().unwrap(), OneWayKind::Sha256);
        assert_eq!(
            "modexp:3".parse::<OneWayKind>().unwrap(),
            OneWayKind::ModExp(BigUint::from(3u32))
        );
        assert!(matches!(
            "md5".parse::<OneWayKind>(),
            Err(Error::UnknownOneWay(_))
        ));
        assert!(matches!(
            "modexp:x".parse::<OneWayKind>(),
            Err(Error::InvalidOneWay(_))
        ));
        for s in ["modexp:3", "modsquare", "sha256"] {
            assert_eq!(s.parse::<OneWayKind>().unwrap().to_string(), s);
        }
        let f = PrimeField::new(7u32).unwrap();
        assert!(OneWayFn::mod_exp(&f, 14).is_err());
    }

    #[test]
    fn rejects_foreign_elements() {
        let f = PrimeField::new(199u32).unwrap();
        let g = PrimeField::new(113u32).unwrap();
        let h = OneWayFn::mod_square(&f);
        assert_eq!(h.apply(&g.one()), Err(Error::FieldMismatch));
    }

    proptest! {
        #[test]
        fn lift_is_coefficientwise(coeffs in prop::collection::vec(0u64..1_000_003, 1..10), variant in 0usize..3) {
            let f = PrimeField::new(1_000_003u32).unwrap();
            let h = match variant {
                0 => OneWayFn::mod_exp(&f, 2).unwrap(),
                1 => OneWayFn::mod_square(&f),
                _ => OneWayFn::sha256(&f),
            };
            let poly = Polynomial::from_u64s(&f, &coeffs).unwrap();
            let lifted = h.lift(&poly).unwrap();
            prop_assert_eq!(lifted.coeff_count(), poly.coeff_count());
            for (l, c) in lifted.coeffs().iter().zip(poly.coeffs()) {
                prop_assert_eq!(l, &h.apply(c).unwrap());
                prop_assert!(l.value() < f.modulus());
            }
        }
    }
}
