//! The virtual Poincaré polynomial `beta` on descriptors and classes.

mod eval;
mod homogeneous;
mod quadric;
mod table;
mod vpoly;

use std::collections::BTreeSet;

pub use eval::{Evaluator, Unsupported};
pub use homogeneous::{
    double_cover_beta, half_line, homogeneous_beta, HomogeneousError, HomogeneousMode,
};
pub use quadric::{classify as classify_quadric, QuadricShape};
pub use table::{canonical_key, ClassTable, TableEntry, TableError, TableIssue};
pub use vpoly::{VirtualPoly, VpolyParseError};

use crate::formula::BasicFormula;
use crate::k0::{chi_closed_form, odd_symmetry, ClassExpr, Descriptor};
use crate::poly::{Dyadic, Poly, Var};

/// Atoms that no rule could evaluate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} unsupported system(s); first: {}", .0.len(), .0[0])]
pub struct BetaError(pub Vec<Unsupported>);

/// `beta` of a descriptor, expanding `!=` by inclusion–exclusion.
pub fn beta_descriptor(d: &Descriptor, ev: &Evaluator) -> Result<VirtualPoly, Unsupported> {
    let amb: BTreeSet<Var> = d.vars();
    let neqs = d.neqs();
    let mut out = VirtualPoly::zero();
    for mask in 0..1u64 << neqs.len() {
        let mut eqs: Vec<Poly> = d.eqs().to_vec();
        let mut sign = 1;
        for (k, q) in neqs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                eqs.push(q.clone());
                sign = -sign;
            }
        }
        out = &out + &ev.eval_in(&amb, &eqs)?.scale(&Dyadic::from_int(sign));
    }
    Ok(out)
}

/// Linear extension of `beta` with `L -> u`.
pub fn beta_class(c: &ClassExpr, ev: &Evaluator) -> Result<VirtualPoly, BetaError> {
    let mut out = VirtualPoly::zero();
    let mut missing = Vec::new();
    for (a, coef) in odd_symmetry(c).terms() {
        let base = match &a.desc {
            None => VirtualPoly::one(),
            Some(d) => match beta_descriptor(d, ev) {
                Ok(v) => v,
                Err(u) => {
                    if !missing.contains(&u) {
                        missing.push(u);
                    }
                    continue;
                }
            },
        };
        out = &out + &base.shift(a.l).scale(coef);
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(BetaError(missing))
    }
}

pub fn beta_formula(f: &BasicFormula, ev: &Evaluator) -> Result<VirtualPoly, BetaError> {
    beta_class(&chi_closed_form(f), ev)
}

/// Replaces every evaluable atom by its `L`-polynomial, keeping the rest symbolic.
pub fn reduce_class(c: &ClassExpr, ev: &Evaluator) -> ClassExpr {
    odd_symmetry(c).map_atoms(|a| match &a.desc {
        None => ClassExpr::l_pow(a.l),
        Some(d) => match beta_descriptor(d, ev) {
            Ok(v) => v.shift(a.l).to_class(),
            Err(_) => ClassExpr::descriptor(Some(d.clone()), a.l),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn beta(s: &str) -> String {
        beta_formula(&parse_formula(s).unwrap(), &Evaluator::default())
            .unwrap()
            .fraction_string()
    }

    #[test]
    fn half_line_and_friends() {
        assert_eq!(beta("vars x; x > 0"), "(u - 1)/2");
        assert_eq!(beta("vars x; x^2 + 1 > 0"), "(3*u - 1)/4");
        assert_eq!(beta("vars x; x > 0, x + 1 > 0"), "(5*u - 11)/16");
        assert_eq!(beta("vars x; x >= 0"), "(u + 1)/2");
    }

    #[test]
    fn open_disc() {
        assert_eq!(beta("vars x, y; 1 - x^2 - y^2 > 0"), "(2*u^2 - 3*u - 1)/4");
    }

    #[test]
    fn fibre_needs_the_table() {
        let f = parse_formula("vars x, y; x*y = 1/4, 1 - x^2 - y^2 > 0").unwrap();
        let err = beta_formula(&f, &Evaluator::bare()).unwrap_err();
        assert!(!err.0.is_empty());
        let t = ClassTable::parse(
            "vars x, y, z; x*y = 1/4, z^2 = 1 - x^2 - y^2 := 2*u + 2\n\
             vars x, y, z; x*y = 1/4, z^2 = x^2 + y^2 - 1 := 2*u - 2",
        )
        .unwrap();
        let ev = Evaluator::new(Some(&t), Some(3));
        assert_eq!(
            beta_formula(&f, &ev).unwrap().fraction_string(),
            "(u - 3)/2"
        );
        let closed = parse_formula("vars x, y; x*y = 1/4, 1 - x^2 - y^2 >= 0").unwrap();
        assert_eq!(
            beta_formula(&closed, &ev).unwrap().fraction_string(),
            "(u + 5)/2"
        );
    }

    #[test]
    fn reduce_keeps_unknown_atoms() {
        let f = parse_formula("vars x, y; x*y = 1/4, 1 - x^2 - y^2 > 0").unwrap();
        let r = reduce_class(&chi_closed_form(&f), &Evaluator::bare());
        assert!(!r.is_l_poly());
    }
}
