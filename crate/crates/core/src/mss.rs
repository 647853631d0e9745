// SPDX-License-Identifier: Apache-2.0

//! Multisecret sharing on top of the two-level scheme.
//!
//! For a secret vector `s = (s_1, ..., s_m)` the dealer publishes the total
//! `s~ = sum s_i` and uses `alpha_i = s~ - s_i` (i = 1..t) directly as the
//! coefficients of `f`. No fresh randomness is involved. Once a coalition
//! recovers `f`, each `s_i = s~ - alpha_i` for `i <= t` follows.
//!
//! The first `k` components are the message; the rest are redundancy that
//! is never recovered. Components are whole field elements, not bits.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::oneway::OneWayFn;
use crate::poly::Polynomial;
use crate::sss::{SchemeParams, Session, SharePolynomials};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretVector {
    components: Vec<FieldElement>,
    message_len: usize,
}

impl SecretVector {
    pub fn new(components: Vec<FieldElement>, message_len: usize) -> Result<Self> {
        if message_len <= 1 || message_len > components.len() {
            return Err(Error::MessageBitsInvalid {
                k: message_len,
                t: components.len(),
            });
        }
        if let Some(first) = components.first() {
            if components.iter().any(|c| c.field() != first.field()) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(SecretVector {
            components,
            message_len,
        })
    }

    pub fn components(&self) -> &[FieldElement] {
        &self.components
    }

    pub fn message_len(&self) -> usize {
        self.message_len
    }

    pub fn message(&self) -> &[FieldElement] {
        &self.components[..self.message_len]
    }
}

/// Values the dealer derives from a [`SecretVector`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MssDerived {
    /// Public sum of all components.
    pub s_tilde: FieldElement,
    pub alphas: Vec<FieldElement>,
    pub h_alphas: Vec<FieldElement>,
}

pub fn derive(
    secret: &SecretVector,
    params: &SchemeParams,
    oneway: &OneWayFn,
) -> Result<MssDerived> {
    let m = params.participant_count();
    let t = params.threshold();
    if secret.components.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: secret.components.len(),
        });
    }
    if t > m - 1 {
        return Err(Error::ThresholdTooLarge { t, max: m - 1 });
    }
    if secret.message_len > t {
        return Err(Error::MessageBitsInvalid {
            k: secret.message_len,
            t,
        });
    }
    let field = params.field();
    if secret.components.iter().any(|c| c.field() != field) || oneway.field() != field {
        return Err(Error::FieldMismatch);
    }
    let s_tilde = secret
        .components
        .iter()
        .fold(field.zero(), |acc, s| &acc + s);
    let alphas: Vec<_> = secret.components[..t]
        .iter()
        .map(|s| &s_tilde - s)
        .collect();
    let h_alphas = alphas
        .iter()
        .map(|a| oneway.apply(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(MssDerived {
        s_tilde,
        alphas,
        h_alphas,
    })
}

/// `f = alpha_1 + alpha_2 x + ...`, `h = H(alpha_1) + H(alpha_2) x + ...`.
pub fn generate(derived: &MssDerived, params: &SchemeParams) -> Result<SharePolynomials> {
    let t = params.threshold();
    for len in [derived.alphas.len(), derived.h_alphas.len()] {
        if len != t {
            return Err(Error::LengthMismatch {
                expected: t,
                got: len,
            });
        }
    }
    Ok(SharePolynomials {
        f: Polynomial::from_coeffs(derived.alphas.clone())?,
        h: Polynomial::from_coeffs(derived.h_alphas.clone())?,
    })
}

/// Shares a secret vector: derive, build `f`, and hand it to a [`Session`].
pub fn share(
    secret: &SecretVector,
    params: &SchemeParams,
    oneway: &OneWayFn,
) -> Result<(MssDerived, Session)> {
    let derived = derive(secret, params, oneway)?;
    let polys = generate(&derived, params)?;
    let session = Session::from_polynomial(params, oneway, polys.f)?;
    debug_assert_eq!(session.polynomials().h, polys.h);
    Ok((derived, session))
}

/// Components recovered from `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredSecrets {
    /// `s_1..s_k`
    pub message: Vec<FieldElement>,
    /// `s_{k+1}..s_t`, recoverable but not part of the message.
    pub non_message: Vec<FieldElement>,
}

pub fn recover_secrets(
    recovered_f: &Polynomial,
    s_tilde: &FieldElement,
    message_len: usize,
) -> Result<RecoveredSecrets> {
    let t = recovered_f.coeff_count();
    if message_len <= 1 || message_len > t {
        return Err(Error::MessageBitsInvalid { k: message_len, t });
    }
    if s_tilde.field() != recovered_f.field() {
        return Err(Error::FieldMismatch);
    }
    let mut all: Vec<_> = recovered_f.coeffs().iter().map(|a| s_tilde - a).collect();
    let non_message = all.split_off(message_len);
    Ok(RecoveredSecrets {
        message: all,
        non_message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::poly::{lagrange_interpolate, EvalPoint};
    use crate::seeded_rng;
    use crate::sss::{level1_recover, Level1Claim, Verdict, VerificationMode};
    use proptest::prelude::*;

    fn vector(field: &PrimeField, values: &[u64], k: usize) -> SecretVector {
        SecretVector::new(values.iter().map(|&v| field.element(v)).collect(), k).unwrap()
    }

    fn u64s(v: &[FieldElement]) -> Vec<u64> {
        v.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn first_example() {
        let params =
            SchemeParams::setup(199u32, 5, 11, &[7, 5, 4, 3, 2, 9, 6, 8, 11, 10, 12]).unwrap();
        let h = OneWayFn::mod_exp(params.field(), 3).unwrap();
        let s = vector(params.field(), &[7, 9, 2, 3, 7, 5, 4, 9, 3, 21, 27], 5);
        let d = derive(&s, &params, &h).unwrap();
        assert_eq!(d.s_tilde.to_u64(), Some(97));
        assert_eq!(u64s(&d.alphas), vec![90, 88, 95, 94, 90]);
        assert_eq!(u64s(&d.h_alphas), vec![188, 43, 113, 104, 188]);
        let polys = generate(&d, &params).unwrap();
        assert_eq!(polys.f.to_u64s(), vec![90, 88, 95, 94, 90]);
        assert_eq!(polys.h.to_u64s(), vec![188, 43, 113, 104, 188]);
        let r = recover_secrets(&polys.f, &d.s_tilde, 5).unwrap();
        assert_eq!(u64s(&r.message), vec![7, 9, 2, 3, 7]);
        assert!(r.non_message.is_empty());
    }

    #[test]
    fn second_example() {
        let keys: Vec<u64> = (1..=17).collect();
        let params = SchemeParams::setup(113u32, 9, 17, &keys).unwrap();
        let h = OneWayFn::mod_square(params.field());
        let s = vector(
            params.field(),
            &[3, 5, 7, 9, 11, 3, 5, 6, 2, 1, 7, 8, 6, 2, 5, 1, 4],
            6,
        );
        let d = derive(&s, &params, &h).unwrap();
        assert_eq!(d.s_tilde.to_u64(), Some(85));
        assert_eq!(u64s(&d.alphas), vec![82, 80, 78, 76, 74, 82, 80, 79, 83]);
        let polys = generate(&d, &params).unwrap();
        assert_eq!(polys.h.to_u64s(), vec![57, 72, 95, 13, 52, 57, 72, 26, 109]);
        let r = recover_secrets(&polys.f, &d.s_tilde, 6).unwrap();
        assert_eq!(u64s(&r.message), vec![3, 5, 7, 9, 11, 3]);
        assert_eq!(u64s(&r.non_message), vec![5, 6, 2]);
    }

    #[test]
    fn all_zero_secret() {
        let params = SchemeParams::setup(199u32, 2, 3, &[1, 2, 3]).unwrap();
        let h = OneWayFn::mod_square(params.field());
        let s = vector(params.field(), &[0, 0, 0], 2);
        let d = derive(&s, &params, &h).unwrap();
        assert!(d.s_tilde.is_zero());
        assert!(d.alphas.iter().all(FieldElement::is_zero));
        let polys = generate(&d, &params).unwrap();
        assert!(polys.f.coeffs().iter().all(FieldElement::is_zero));
        assert!(polys.h.coeffs().iter().all(FieldElement::is_zero));
        let r = recover_secrets(&polys.f, &d.s_tilde, 2).unwrap();
        assert!(r.message.iter().all(FieldElement::is_zero));
    }

    #[test]
    fn derive_errors() {
        let params = SchemeParams::setup(199u32, 3, 4, &[1, 2, 3, 4]).unwrap();
        let h = OneWayFn::mod_square(params.field());
        let f = params.field();
        assert!(matches!(
            derive(&vector(f, &[1, 2, 3], 2), &params, &h),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            derive(&vector(f, &[1, 2, 3, 4], 4), &params, &h),
            Err(Error::MessageBitsInvalid { k: 4, t: 3 })
        ));
        assert!(matches!(
            SecretVector::new(vec![f.one(), f.one()], 1),
            Err(Error::MessageBitsInvalid { .. })
        ));
        let full = SchemeParams::setup(199u32, 4, 4, &[1, 2, 3, 4]).unwrap();
        assert!(matches!(
            derive(&vector(f, &[1, 2, 3, 4], 2), &full, &h),
            Err(Error::ThresholdTooLarge { t: 4, max: 3 })
        ));
        let poly = Polynomial::from_u64s(f, &[1, 2, 3]).unwrap();
        assert!(matches!(
            recover_secrets(&poly, &f.one(), 4),
            Err(Error::MessageBitsInvalid { .. })
        ));
    }

    #[test]
    fn aliasing_vectors_recover_identically() {
        // Same s~ and same first t components: only the parity tail differs.
        let params = SchemeParams::setup(199u32, 3, 5, &[1, 2, 3, 4, 5]).unwrap();
        let h = OneWayFn::mod_exp(params.field(), 3).unwrap();
        let a = vector(params.field(), &[10, 20, 30, 5, 7], 3);
        let b = vector(params.field(), &[10, 20, 30, 8, 4], 3);
        let (da, _) = share(&a, &params, &h).unwrap();
        let (db, _) = share(&b, &params, &h).unwrap();
        assert_eq!(da, db);
    }

    #[test]
    fn mss_reuses_two_level_flow() {
        let params =
            SchemeParams::setup(199u32, 5, 11, &[7, 5, 4, 3, 2, 9, 6, 8, 11, 10, 12]).unwrap();
        let h = OneWayFn::mod_exp(params.field(), 3).unwrap();
        let s = vector(params.field(), &[7, 9, 2, 3, 7, 5, 4, 9, 3, 21, 27], 5);
        let (d, mut session) = share(&s, &params, &h).unwrap();
        let keys: Vec<_> = params.public_keys()[5..10].to_vec();
        let pts = session.level1_shares(&keys).unwrap();
        let (_, claimed) = level1_recover(&pts, 5).unwrap();
        let Verdict::Accepted(released) = session
            .verify_and_release(
                &Level1Claim::ConstantTerm(claimed),
                &keys,
                VerificationMode::ConstantTerm,
            )
            .unwrap()
        else {
            panic!("expected acceptance")
        };
        let f = lagrange_interpolate(&released, 5).unwrap();
        let r = recover_secrets(&f, &d.s_tilde, 5).unwrap();
        assert_eq!(u64s(&r.message), vec![7, 9, 2, 3, 7]);
    }

    proptest! {
        #[test]
        fn derive_then_recover(seed in any::<u64>(), m in 3usize..12, t_off in 0usize..10, k_off in 0usize..10) {
            let field = PrimeField::new(1_000_003u32).unwrap();
            let t = 2 + t_off % (m - 2);
            let k = 2 + k_off % (t - 1);
            let keys: Vec<u64> = (1..=m as u64).collect();
            let params = SchemeParams::setup(1_000_003u32, t, m, &keys).unwrap();
            let h = OneWayFn::sha256(&field);
            let mut rng = seeded_rng(seed);
            let comps: Vec<_> = (0..m).map(|_| field.random(&mut rng)).collect();
            let s = SecretVector::new(comps, k).unwrap();
            let (d, session) = share(&s, &params, &h).unwrap();
            let pts: Vec<_> = session.params().public_keys()[..t].iter()
                .map(|a| EvalPoint::new(a.clone(), session.polynomials().f.eval(a).unwrap()))
                .collect();
            let f = lagrange_interpolate(&pts, t).unwrap();
            let r = recover_secrets(&f, &d.s_tilde, k).unwrap();
            prop_assert_eq!(&r.message[..], s.message());
            prop_assert_eq!(&r.non_message[..], &s.components()[k..t]);
        }
    }
}
