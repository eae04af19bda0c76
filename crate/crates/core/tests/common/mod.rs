//! Random exact inputs shared by the property suites.
#![allow(dead_code)]

use std::sync::Arc;

use folhp::cartan::{DiffForm, Graded, Kind, Multivector};
use folhp::expr::num::rat;
use folhp::expr::{Chart, Scalar};
use folhp::linalg::subsets;
use proptest::prelude::*;

pub type RawPoly = Vec<(Vec<u32>, i64, i64)>;

pub fn chart(n: usize) -> Arc<Chart> {
    Chart::numbered(&format!("R{n}"), "x", n)
}

/// Up to `terms` monomials of degree at most `max_exp` per variable.
pub fn raw_poly(n: usize, terms: usize, max_exp: u32) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), -5i64..=5, 1i64..=3), 0..=terms)
}

pub fn poly(c: &Arc<Chart>, raw: &RawPoly) -> Scalar {
    Scalar::from_terms(c, raw.iter().map(|(e, p, q)| (e.clone(), rat(*p, *q)))).expect("exponent length")
}

pub fn scalar(n: usize) -> impl Strategy<Value = Scalar> {
    raw_poly(n, 4, 2).prop_map(move |r| poly(&chart(n), &r))
}

/// Random element of a fixed degree: one random polynomial per basis tuple.
pub fn graded<K: Kind>(n: usize, degree: usize) -> impl Strategy<Value = Graded<K>> {
    let tuples = subsets(n, degree);
    let k = tuples.len();
    prop::collection::vec(raw_poly(n, 2, 2), k).prop_map(move |raws| {
        let c = chart(n);
        Graded::from_terms(&c, degree, tuples.iter().cloned().zip(raws.iter().map(|r| poly(&c, r))))
            .expect("valid basis tuples")
    })
}

pub fn form(n: usize, degree: usize) -> impl Strategy<Value = DiffForm> {
    graded(n, degree)
}

pub fn multivector(n: usize, degree: usize) -> impl Strategy<Value = Multivector> {
    graded(n, degree)
}

/// Form of random degree in `0..=max`.
pub fn any_form(n: usize, max: usize) -> impl Strategy<Value = DiffForm> {
    (0..=max).prop_flat_map(move |p| form(n, p))
}

/// Polynomial self-map components of low degree.
pub fn map_comps(n: usize) -> impl Strategy<Value = Vec<RawPoly>> {
    prop::collection::vec(raw_poly(n, 3, 1), n)
}

pub fn sign(k: usize) -> folhp::expr::Rational {
    if k % 2 == 0 {
        rat(1, 1)
    } else {
        rat(-1, 1)
    }
}
