// SPDX-License-Identifier: Apache-2.0

//! Two-level single-secret sharing.
//!
//! The dealer draws `f(x) = s + r_1 x + ... + r_{t-1} x^{t-1}` and lifts it
//! through a one-way function `H` to `h(x) = H(s) + H(r_1) x + ...`. Level 1
//! hands out `h(a_i)`. A coalition that interpolates `h` and presents
//! `H(s)` to the system, with at least `t` members, receives the level-2
//! shares `f(a_i)` and can then interpolate `f(0) = s`.
//!
//! [`Session`] is the system's state machine. `f`-shares leave it only
//! through [`Session::verify_and_release`].

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::oneway::OneWayFn;
use crate::poly::{interpolate_at_zero, lagrange_interpolate, EvalPoint, Polynomial};

/// Public scheme context: field, threshold and participant public keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    field: PrimeField,
    threshold: usize,
    public_keys: Vec<FieldElement>,
}

impl SchemeParams {
    pub fn new(
        field: &PrimeField,
        threshold: usize,
        public_keys: Vec<FieldElement>,
    ) -> Result<Self> {
        let m = public_keys.len();
        if threshold <= 1 || threshold > m {
            return Err(Error::ThresholdInvalid { t: threshold, m });
        }
        if &BigUint::from(m) >= field.modulus() {
            return Err(Error::TooManyParticipants {
                m,
                p: field.modulus().to_string(),
            });
        }
        for (i, key) in public_keys.iter().enumerate() {
            if key.field() != field {
                return Err(Error::FieldMismatch);
            }
            if key.is_zero() {
                return Err(Error::ZeroKey);
            }
            if public_keys[..i].contains(key) {
                return Err(Error::DuplicateKey(key.to_string()));
            }
        }
        Ok(SchemeParams {
            field: field.clone(),
            threshold,
            public_keys,
        })
    }

    /// Validates `(p, t, m, keys)` from raw integers. `m` must match the key count.
    pub fn setup(p: impl Into<BigUint>, t: usize, m: usize, public_keys: &[u64]) -> Result<Self> {
        if public_keys.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: public_keys.len(),
            });
        }
        let field = PrimeField::new(p)?;
        if &BigUint::from(m) >= field.modulus() {
            return Err(Error::TooManyParticipants {
                m,
                p: field.modulus().to_string(),
            });
        }
        let keys = public_keys.iter().map(|&k| field.element(k)).collect();
        // reject keys that are >= p before reduction hides them
        if public_keys
            .iter()
            .any(|&k| &BigUint::from(k) >= field.modulus())
        {
            return Err(Error::FieldMismatch);
        }
        Self::new(&field, t, keys)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn participant_count(&self) -> usize {
        self.public_keys.len()
    }

    pub fn public_keys(&self) -> &[FieldElement] {
        &self.public_keys
    }

    pub fn key_index(&self, key: &FieldElement) -> Option<usize> {
        self.public_keys.iter().position(|k| k == key)
    }
}

/// The dealer's pair `(f, h)` with `h = H(f)` coefficient-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharePolynomials {
    pub f: Polynomial,
    pub h: Polynomial,
}

/// What the system holds for one participant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareRecord {
    public_key: FieldElement,
    h_share: FieldElement,
    f_share: FieldElement,
    f_released: bool,
}

impl ShareRecord {
    pub fn public_key(&self) -> &FieldElement {
        &self.public_key
    }

    pub fn h_share(&self) -> &FieldElement {
        &self.h_share
    }

    /// The level-2 share, once it has been released.
    pub fn released_f_share(&self) -> Option<&FieldElement> {
        self.f_released.then_some(&self.f_share)
    }

    pub fn is_released(&self) -> bool {
        self.f_released
    }
}

/// How the system checks a level-1 recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationMode {
    /// Compare only the claimed constant term `H(s)`.
    #[default]
    ConstantTerm,
    /// Compare every coefficient and every submitted share.
    Strict,
}

/// What a coalition presents after interpolating `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level1Claim {
    ConstantTerm(FieldElement),
    Polynomial(Polynomial),
}

impl Level1Claim {
    pub fn constant_term(&self) -> &FieldElement {
        match self {
            Level1Claim::ConstantTerm(c) => c,
            Level1Claim::Polynomial(p) => p.constant_term(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    BelowThreshold { submitted: usize, threshold: usize },
    ClaimMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Released `(a_i, f(a_i))` pairs for the submitting keys.
    Accepted(Vec<EvalPoint>),
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

/// System-side state for one sharing of one polynomial pair.
#[derive(Clone, Debug)]
pub struct Session {
    params: SchemeParams,
    oneway: OneWayFn,
    polynomials: SharePolynomials,
    records: Vec<ShareRecord>,
    expected_level1: FieldElement,
}

impl Session {
    /// Shares `secret` with fresh random coefficients `r_1..r_{t-1}`.
    pub fn generate<R: Rng + ?Sized>(
        params: &SchemeParams,
        oneway: &OneWayFn,
        secret: FieldElement,
        rng: &mut R,
    ) -> Result<Self> {
        let f = Polynomial::random(params.field(), secret, params.threshold(), rng)?;
        Self::from_polynomial(params, oneway, f)
    }

    /// Builds a session around a given `f`; `h` is derived as `H(f)`.
    pub fn from_polynomial(
        params: &SchemeParams,
        oneway: &OneWayFn,
        f: Polynomial,
    ) -> Result<Self> {
        if oneway.field() != params.field() || f.field() != params.field() {
            return Err(Error::FieldMismatch);
        }
        if f.coeff_count() != params.threshold() {
            return Err(Error::WrongCount {
                expected: params.threshold(),
                got: f.coeff_count(),
            });
        }
        let h = oneway.lift(&f)?;
        let records = params
            .public_keys()
            .iter()
            .map(|a| {
                Ok(ShareRecord {
                    public_key: a.clone(),
                    h_share: h.eval(a)?,
                    f_share: f.eval(a)?,
                    f_released: false,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let expected_level1 = h.constant_term().clone();
        Ok(Session {
            params: params.clone(),
            oneway: oneway.clone(),
            polynomials: SharePolynomials { f, h },
            records,
            expected_level1,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn oneway(&self) -> &OneWayFn {
        &self.oneway
    }

    /// Dealer-side view of `(f, h)`.
    pub fn polynomials(&self) -> &SharePolynomials {
        &self.polynomials
    }

    pub fn records(&self) -> &[ShareRecord] {
        &self.records
    }

    /// `H(s)`, the constant term of `h`.
    pub fn expected_level1(&self) -> &FieldElement {
        &self.expected_level1
    }

    fn record_index(&self, key: &FieldElement) -> Result<usize> {
        self.params
            .key_index(key)
            .ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    /// Level-1 shares `(a_i, h(a_i))` for the requested keys, in request order.
    pub fn level1_shares(&self, keys: &[FieldElement]) -> Result<Vec<EvalPoint>> {
        keys.iter()
            .map(|k| {
                let r = &self.records[self.record_index(k)?];
                Ok(EvalPoint::new(r.public_key.clone(), r.h_share.clone()))
            })
            .collect()
    }

    /// Keys whose submitted `h`-share differs from the stored record.
    pub fn mismatched_shares(&self, submitted: &[EvalPoint]) -> Result<Vec<FieldElement>> {
        let mut cheaters = Vec::new();
        for p in submitted {
            let r = &self.records[self.record_index(&p.x)?];
            if r.h_share != p.y && !cheaters.contains(&p.x) {
                cheaters.push(p.x.clone());
            }
        }
        Ok(cheaters)
    }

    /// Whether a claim matches `h` under the given mode.
    pub fn claim_matches(&self, claim: &Level1Claim, mode: VerificationMode) -> bool {
        match (mode, claim) {
            (VerificationMode::Strict, Level1Claim::Polynomial(p)) => p == &self.polynomials.h,
            _ => claim.constant_term() == &self.expected_level1,
        }
    }

    /// Checks the claim and, on success, releases `f(a_i)` to every
    /// submitting key. A rejected claim leaves the session untouched.
    pub fn verify_and_release(
        &mut self,
        claim: &Level1Claim,
        submitting_keys: &[FieldElement],
        mode: VerificationMode,
    ) -> Result<Verdict> {
        let mut indices = BTreeSet::new();
        let mut ordered = Vec::new();
        for key in submitting_keys {
            let idx = self.record_index(key)?;
            if indices.insert(idx) {
                ordered.push(idx);
            }
        }
        if !self.claim_matches(claim, mode) {
            return Ok(Verdict::Rejected(RejectReason::ClaimMismatch));
        }
        let threshold = self.params.threshold();
        if ordered.len() < threshold {
            return Ok(Verdict::Rejected(RejectReason::BelowThreshold {
                submitted: ordered.len(),
                threshold,
            }));
        }
        let released = ordered
            .into_iter()
            .map(|idx| {
                let r = &mut self.records[idx];
                r.f_released = true;
                EvalPoint::new(r.public_key.clone(), r.f_share.clone())
            })
            .collect();
        Ok(Verdict::Accepted(released))
    }
}

/// Interpolates `h` from exactly `t` level-1 shares and returns it with its
/// constant term, the claimed `H(s)`.
pub fn level1_recover(
    points: &[EvalPoint],
    threshold: usize,
) -> Result<(Polynomial, FieldElement)> {
    let h = lagrange_interpolate(points, threshold)?;
    let claimed = h.constant_term().clone();
    Ok((h, claimed))
}

/// Recovers `s = f(0)` from exactly `t` released level-2 shares.
pub fn level2_recover(points: &[EvalPoint], threshold: usize) -> Result<FieldElement> {
    interpolate_at_zero(points, threshold)
}
