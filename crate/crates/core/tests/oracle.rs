// SPDX-License-Identifier: Apache-2.0

//! Cross-checks against a small u64 model of the scheme.

use proptest::prelude::*;
use rand::Rng;
use tlss_core::mss::{self, SecretVector};
use tlss_core::sss::{SchemeParams, Session};
use tlss_core::{seeded_rng, OneWayFn};

const P: u64 = 7919;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

fn eval(coeffs: &[u64], x: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, c| (acc * x + c) % P)
}

fn distinct_keys(seed: u64, m: usize) -> Vec<u64> {
    let mut rng = seeded_rng(seed);
    let mut keys = Vec::new();
    while keys.len() < m {
        let k = rng.gen_range(1..P);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_secret_shares_match_model(seed in any::<u64>(), t in 2usize..7, extra in 0usize..4, s in 0u64..P) {
        let m = t + extra;
        let keys = distinct_keys(seed, m);
        let params = SchemeParams::setup(P, t, m, &keys).unwrap();
        let h = OneWayFn::mod_exp(params.field(), 5).unwrap();
        let session = Session::generate(&params, &h, params.field().element(s), &mut seeded_rng(seed)).unwrap();

        let f = session.polynomials().f.to_u64s();
        prop_assert_eq!(f[0], s);
        let h_model: Vec<u64> = f.iter().map(|&c| pow_mod(5, c)).collect();
        prop_assert_eq!(session.polynomials().h.to_u64s(), h_model.clone());
        prop_assert_eq!(session.expected_level1().to_u64(), Some(pow_mod(5, s)));
        for (r, &a) in session.records().iter().zip(&keys) {
            prop_assert_eq!(r.h_share().to_u64(), Some(eval(&h_model, a)));
        }
    }

    #[test]
    fn multisecret_derivation_matches_model(seed in any::<u64>(), t in 2usize..7, extra in 1usize..4) {
        let m = t + extra;
        let keys = distinct_keys(seed, m);
        let params = SchemeParams::setup(P, t, m, &keys).unwrap();
        let field = params.field();
        let mut rng = seeded_rng(seed ^ 1);
        let values: Vec<u64> = (0..m).map(|_| rng.gen_range(0..P)).collect();
        let secret = SecretVector::new(values.iter().map(|&v| field.element(v)).collect(), 2).unwrap();
        let h = OneWayFn::mod_square(field);
        let (derived, session) = mss::share(&secret, &params, &h).unwrap();

        let total = values.iter().sum::<u64>() % P;
        prop_assert_eq!(derived.s_tilde.to_u64(), Some(total));
        let alphas: Vec<u64> = values[..t].iter().map(|v| (total + P - v) % P).collect();
        prop_assert_eq!(session.polynomials().f.to_u64s(), alphas.clone());
        let h_model: Vec<u64> = alphas.iter().map(|a| a * a % P).collect();
        prop_assert_eq!(session.polynomials().h.to_u64s(), h_model);
    }
}
