#![allow(dead_code)]

use std::path::PathBuf;

use bsa_core::formula::BasicFormula;
use bsa_core::poly::{rat, Monomial, Poly, Var};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub const SEED: u64 = 0x5eed_b5a0;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn var_names(n: usize) -> Vec<Var> {
    ["x", "y", "z", "w"][..n]
        .iter()
        .map(|s| Var::new(s))
        .collect()
}

/// Sparse polynomial with small integer coefficients and total degree at most `deg`.
pub fn poly(vars: Vec<Var>, deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    let term = (-3i64..=3, proptest::collection::vec(0..=deg, n));
    proptest::collection::vec(term, 1..=max_terms).prop_map(move |ts| {
        ts.into_iter()
            .filter(|(_, es)| es.iter().sum::<u32>() <= deg)
            .map(|(c, es)| {
                Poly::monomial(Monomial::from_pairs(vars.iter().cloned().zip(es)), rat(c))
            })
            .fold(Poly::zero(), |acc, t| &acc + &t)
    })
}

/// A random part plus one variable to a power, rejected when it cancels to a constant.
pub fn nonconstant(vars: Vec<Var>, deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    (
        poly(vars.clone(), deg.saturating_sub(1).max(1), max_terms),
        0..n,
        1..=deg,
        prop_oneof![Just(1i64), Just(-1i64), Just(2i64)],
    )
        .prop_map(move |(p, i, e, c)| &p + &Poly::var(vars[i].clone()).pow(e).scale(&rat(c)))
        .prop_filter("constant", |p| !p.is_constant())
}

/// Up to one equation, one inequation and `max_pos` inequalities.
pub fn formula(nvars: usize, max_pos: usize, deg: u32) -> impl Strategy<Value = BasicFormula> {
    let vs = var_names(nvars);
    (
        proptest::option::weighted(0.3, nonconstant(vs.clone(), deg, 3)),
        proptest::option::weighted(0.3, nonconstant(vs.clone(), deg, 3)),
        proptest::collection::vec(nonconstant(vs.clone(), deg, 3), 0..=max_pos),
    )
        .prop_map(move |(eq, neq, pos)| {
            let mut f = BasicFormula::new(vs.clone());
            if let Some(p) = eq {
                f.add_eq(p);
            }
            if let Some(p) = neq {
                f.add_neq(p);
            }
            for p in pos {
                f.add_pos(p);
            }
            f
        })
}

/// Low-degree formulas in up to three variables, mostly within reach of the catalog.
pub fn catalog_formula() -> impl Strategy<Value = BasicFormula> {
    (1usize..=3).prop_flat_map(|n| {
        let vs = var_names(n);
        let deg = if n == 1 { 3 } else { 2 };
        let max_pos = if n == 3 { 1 } else { 2 };
        (
            proptest::option::weighted(0.5, nonconstant(vs.clone(), 2, 3)),
            proptest::collection::vec(nonconstant(vs.clone(), deg, 3), 0..=max_pos),
        )
            .prop_map(move |(eq, pos)| {
                let mut f = BasicFormula::new(vs.clone());
                if let Some(p) = eq {
                    f.add_eq(p);
                }
                for p in pos {
                    f.add_pos(p);
                }
                f
            })
    })
}
