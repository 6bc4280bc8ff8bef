//! Exact polynomial kernel: rationals, dyadics, sparse multivariate
//! polynomials and the univariate real-root machinery.

mod dyadic;
mod monomial;
mod multivariate;
pub mod resultant;
pub mod univariate;

use thiserror::Error;

pub use dyadic::Dyadic;
pub use monomial::{Monomial, Var};
pub(crate) use multivariate::{fmt_rational, rational_sqrt};
pub use multivariate::{rat, Poly};
pub use resultant::{principal_subresultants, resultant};
pub use univariate::{sturm_isolate, RootInterval, UPoly};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("polynomial {0} is not univariate")]
    NotUnivariate(String),
    #[error("{poly} is constant in {var}")]
    Degenerate { poly: String, var: String },
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_poly() -> impl Strategy<Value = Poly> {
        let term = (-3i64..=3, 0u32..=2, 0u32..=2);
        proptest::collection::vec(term, 0..4).prop_map(|ts| {
            ts.into_iter()
                .map(|(c, a, b)| {
                    Poly::monomial(
                        Monomial::from_pairs([(Var::new("x"), a), (Var::new("y"), b)]),
                        rat(c),
                    )
                })
                .fold(Poly::zero(), |acc, t| acc + t)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn resultant_vanishes_on_common_factor(a in small_poly(), b in small_poly(), k in 1i64..4) {
            let x = Var::new("x");
            let common = Poly::var("x") - Poly::var("y") * Poly::int(k);
            let p = &common * &(&a + &Poly::var("x").pow(2));
            let q = &common * &(&b + &Poly::var("x"));
            prop_assume!(p.degree_in(&x) > 0 && q.degree_in(&x) > 0);
            prop_assert!(resultant(&p, &q, &x).unwrap().is_zero());
        }

        #[test]
        fn sturm_count_matches_isolation(cs in proptest::collection::vec(-4i64..=4, 1..6)) {
            let p = UPoly::from_ints(&cs);
            prop_assume!(!p.is_zero());
            let roots = p.isolate_roots().unwrap();
            prop_assert_eq!(roots.len(), p.count_real_roots());
            for w in roots.windows(2) {
                prop_assert!(w[0].hi() <= w[1].lo());
            }
        }
    }
}
