// SPDX-License-Identifier: Apache-2.0

//! Dense polynomials over a prime field with a fixed coefficient count.
//!
//! Scheme polynomials always have exactly `t` coefficients. Trailing zero
//! coefficients are kept, so the threshold never changes when a random draw
//! happens to produce a zero leading term.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
    field: PrimeField,
}

/// A point `(x, y)` on a polynomial, typically `(a_i, f(a_i))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvalPoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl EvalPoint {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        EvalPoint { x, y }
    }
}

impl Polynomial {
    /// Coefficient `i` multiplies `x^i`. At least one coefficient is required.
    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Result<Self> {
        let field = match coeffs.first() {
            Some(c) => c.field().clone(),
            None => {
                return Err(Error::WrongCount {
                    expected: 1,
                    got: 0,
                })
            }
        };
        if coeffs.iter().any(|c| c.field() != &field) {
            return Err(Error::FieldMismatch);
        }
        Ok(Polynomial { coeffs, field })
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_u64s(field: &PrimeField, coeffs: &[u64]) -> Result<Self> {
        Self::from_coeffs(coeffs.iter().map(|&c| field.element(c)).collect())
    }

    /// Constant term plus `coeff_count - 1` uniformly random coefficients.
    pub fn random<R: Rng + ?Sized>(
        field: &PrimeField,
        constant: FieldElement,
        coeff_count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if coeff_count == 0 {
            return Err(Error::WrongCount {
                expected: 1,
                got: 0,
            });
        }
        if constant.field() != field {
            return Err(Error::FieldMismatch);
        }
        let mut coeffs = Vec::with_capacity(coeff_count);
        coeffs.push(constant);
        coeffs.extend((1..coeff_count).map(|_| field.random(rng)));
        Ok(Polynomial {
            coeffs,
            field: field.clone(),
        })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn constant_term(&self) -> &FieldElement {
        &self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c))
    }

    /// Coefficient values as `u64`s; panics if any exceeds `u64`.
    pub fn to_u64s(&self) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|c| c.to_u64().expect("coefficient exceeds u64"))
            .collect()
    }
}

fn validate_points(points: &[EvalPoint], coeff_count: usize) -> Result<PrimeField> {
    if coeff_count == 0 || points.len() != coeff_count {
        return Err(Error::WrongCount {
            expected: coeff_count,
            got: points.len(),
        });
    }
    let field = points[0].x.field().clone();
    for (i, p) in points.iter().enumerate() {
        if p.x.field() != &field || p.y.field() != &field {
            return Err(Error::FieldMismatch);
        }
        if points[..i].iter().any(|q| q.x == p.x) {
            return Err(Error::DuplicateNode(p.x.to_string()));
        }
    }
    Ok(field)
}

/// The unique polynomial with `coeff_count` coefficients through `points`.
///
/// Builds the master polynomial `M(x) = prod (x - x_j)` once, then obtains
/// each basis numerator `M(x) / (x - x_i)` by synthetic division, giving
/// `O(t^2)` field operations overall.
pub fn lagrange_interpolate(points: &[EvalPoint], coeff_count: usize) -> Result<Polynomial> {
    let field = validate_points(points, coeff_count)?;
    let t = coeff_count;

    // master[i] is the coefficient of x^i; degree t.
    let mut master = vec![field.zero(); t + 1];
    master[0] = field.one();
    for (deg, p) in points.iter().enumerate() {
        for i in (0..=deg + 1).rev() {
            let shifted = if i > 0 {
                master[i - 1].clone()
            } else {
                field.zero()
            };
            master[i] = &shifted - &(&master[i] * &p.x);
        }
    }

    let mut result = vec![field.zero(); t];
    for (i, p) in points.iter().enumerate() {
        // quotient = master / (x - x_i), computed from the top down
        let mut quotient = vec![field.zero(); t];
        let mut carry = field.zero();
        for k in (0..t).rev() {
            carry = &master[k + 1] + &(&carry * &p.x);
            quotient[k] = carry.clone();
        }
        let denominator = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(field.one(), |acc, (_, q)| &acc * &(&p.x - &q.x));
        let scale = &p.y * &denominator.inv()?;
        for (r, q) in result.iter_mut().zip(&quotient) {
            *r = &*r + &(q * &scale);
        }
    }
    Polynomial::from_coeffs(result)
}

/// Only the constant term of the interpolating polynomial, `O(t^2)`.
pub fn interpolate_at_zero(points: &[EvalPoint], coeff_count: usize) -> Result<FieldElement> {
    let field = validate_points(points, coeff_count)?;
    let mut acc = field.zero();
    for (i, p) in points.iter().enumerate() {
        let mut num = field.one();
        let mut den = field.one();
        for (j, q) in points.iter().enumerate() {
            if i != j {
                num = &num * &q.x;
                den = &den * &(&q.x - &p.x);
            }
        }
        acc = &acc + &(&p.y * &(&num * &den.inv()?));
    }
    Ok(acc)
}
