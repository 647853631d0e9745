// SPDX-License-Identifier: Apache-2.0

//! The two worked multisecret examples, regenerated and checked against
//! embedded tables.

use std::fmt::Write as _;

use tlss_core::mss::{self, SecretVector};
use tlss_core::poly::lagrange_interpolate;
use tlss_core::sss::{level1_recover, Level1Claim, SchemeParams, Verdict, VerificationMode};
use tlss_core::{FieldElement, OneWayFn, Result};

struct Example {
    prime: u64,
    threshold: usize,
    keys: Vec<u64>,
    secret: Vec<u64>,
    message_len: usize,
    oneway: fn(&tlss_core::PrimeField) -> OneWayFn,
    expected: Expected,
}

struct Expected {
    s_tilde: u64,
    alphas: Vec<u64>,
    h_alphas: Vec<u64>,
    f_row: Vec<u64>,
    h_row: Vec<u64>,
    message: Vec<u64>,
}

fn example(which: u8) -> Option<Example> {
    match which {
        1 => Some(Example {
            prime: 199,
            threshold: 5,
            keys: vec![7, 5, 4, 3, 2, 9, 6, 8, 11, 10, 12],
            secret: vec![7, 9, 2, 3, 7, 5, 4, 9, 3, 21, 27],
            message_len: 5,
            oneway: |f| OneWayFn::mod_exp(f, 3).expect("3 is a unit mod 199"),
            expected: Expected {
                s_tilde: 97,
                alphas: vec![90, 88, 95, 94, 90],
                h_alphas: vec![188, 43, 113, 104, 188],
                f_row: vec![167, 61, 173, 92, 52, 147, 90, 170, 70, 117, 166],
                h_row: vec![163, 0, 38, 67, 188, 40, 185, 36, 65, 147, 34],
                message: vec![7, 9, 2, 3, 7],
            },
        }),
        2 => Some(Example {
            prime: 113,
            threshold: 9,
            keys: (1..=17).collect(),
            secret: vec![3, 5, 7, 9, 11, 3, 5, 6, 2, 1, 7, 8, 6, 2, 5, 1, 4],
            message_len: 6,
            oneway: OneWayFn::mod_square,
            expected: Expected {
                s_tilde: 85,
                alphas: vec![82, 80, 78, 76, 74, 82, 80, 79, 83],
                h_alphas: vec![57, 72, 95, 13, 52, 57, 72, 26, 109],
                f_row: vec![
                    36, 92, 92, 63, 16, 9, 28, 96, 68, 104, 52, 106, 84, 47, 73, 3, 41,
                ],
                h_row: vec![
                    101, 83, 44, 108, 1, 65, 66, 89, 100, 37, 3, 105, 19, 27, 45, 25, 0,
                ],
                message: vec![3, 5, 7, 9, 11, 3],
            },
        }),
        _ => None,
    }
}

/// One regenerated table row next to its expected values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub label: &'static str,
    pub computed: Vec<u64>,
    pub expected: Vec<u64>,
}

impl Row {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub which: u8,
    pub prime: u64,
    pub threshold: usize,
    pub keys: Vec<u64>,
    pub rows: Vec<Row>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Row::matches)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "example {}: p={} (t,m)=({},{}) keys={:?}",
            self.which,
            self.prime,
            self.threshold,
            self.keys.len(),
            self.keys
        );
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        for row in &self.rows {
            let status = if row.matches() { "ok" } else { "MISMATCH" };
            let _ = writeln!(out, "  {:width$}  {:?}  {status}", row.label, row.computed);
            if !row.matches() {
                let _ = writeln!(out, "  {:width$}  {:?}", "expected", row.expected);
            }
        }
        let _ = writeln!(
            out,
            "self-check: {}",
            if self.passed() { "pass" } else { "FAIL" }
        );
        out
    }
}

fn u64s(values: &[FieldElement]) -> Vec<u64> {
    values
        .iter()
        .map(|v| v.to_u64().expect("small field"))
        .collect()
}

/// Regenerates an example through both recovery levels. `None` for an
/// unknown example number.
pub fn run_example(which: u8) -> Option<Result<ExampleReport>> {
    let ex = example(which)?;
    Some(regenerate(which, &ex))
}

fn regenerate(which: u8, ex: &Example) -> Result<ExampleReport> {
    let params = SchemeParams::setup(ex.prime, ex.threshold, ex.keys.len(), &ex.keys)?;
    let field = params.field().clone();
    let oneway = (ex.oneway)(&field);
    let secret = SecretVector::new(
        ex.secret.iter().map(|&s| field.element(s)).collect(),
        ex.message_len,
    )?;
    let (derived, mut session) = mss::share(&secret, &params, &oneway)?;
    let t = ex.threshold;

    let f = &session.polynomials().f;
    let f_row = u64s(
        &params
            .public_keys()
            .iter()
            .map(|a| f.eval(a))
            .collect::<Result<Vec<_>>>()?,
    );
    let h_row = u64s(
        &session
            .records()
            .iter()
            .map(|r| r.h_share().clone())
            .collect::<Vec<_>>(),
    );

    // the first t participants pool their h-shares
    let keys: Vec<FieldElement> = params.public_keys()[..t].to_vec();
    let h_points = session.level1_shares(&keys)?;
    let (h, _) = level1_recover(&h_points, t)?;
    let verdict = session.verify_and_release(
        &Level1Claim::Polynomial(h.clone()),
        &keys,
        VerificationMode::Strict,
    )?;
    let f_points = match verdict {
        Verdict::Accepted(points) => points,
        Verdict::Rejected(_) => Vec::new(),
    };
    let recovered = if f_points.len() == t {
        let f = lagrange_interpolate(&f_points, t)?;
        let r = mss::recover_secrets(&f, &derived.s_tilde, ex.message_len)?;
        u64s(&r.message)
    } else {
        Vec::new()
    };

    let e = &ex.expected;
    Ok(ExampleReport {
        which,
        prime: ex.prime,
        threshold: t,
        keys: ex.keys.clone(),
        rows: vec![
            Row {
                label: "s~",
                computed: u64s(std::slice::from_ref(&derived.s_tilde)),
                expected: vec![e.s_tilde],
            },
            Row {
                label: "alpha",
                computed: u64s(&derived.alphas),
                expected: e.alphas.clone(),
            },
            Row {
                label: "H(alpha)",
                computed: u64s(&derived.h_alphas),
                expected: e.h_alphas.clone(),
            },
            Row {
                label: "f(a_i)",
                computed: f_row,
                expected: e.f_row.clone(),
            },
            Row {
                label: "h(a_i)",
                computed: h_row,
                expected: e.h_row.clone(),
            },
            Row {
                label: "recovered h",
                computed: h.to_u64s(),
                expected: e.h_alphas.clone(),
            },
            Row {
                label: "s_j (message)",
                computed: recovered,
                expected: e.message.clone(),
            },
        ],
    })
}
