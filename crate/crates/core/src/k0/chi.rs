use super::{is_cover, ClassExpr, Descriptor, COVER_PREFIX};
use crate::formula::BasicFormula;
use crate::poly::{Dyadic, Poly, Var};

/// The class of an inequality-free formula.
pub fn algebraic_class(f: &BasicFormula) -> ClassExpr {
    let (d, free) = Descriptor::from_formula(f).expect("formula has inequalities");
    ClassExpr::descriptor(d, free as i64)
}

fn cover_square(y: &Var) -> Poly {
    Poly::var(y.clone()).pow(2)
}

/// Closed form: the signed sum over all `3^r` choices `Y^2 = R`, `Y^2 = -R`, `R != 0`.
///
/// `>=` constraints are expanded first.
pub fn chi_closed_form(f: &BasicFormula) -> ClassExpr {
    if f.has_geq() {
        return measure_geq(f);
    }
    let r = f.pos().len();
    let n = f.nvars() as i64;
    let covers: Vec<Var> = (1..=r)
        .map(|k| Var::new(&format!("{COVER_PREFIX}{k}")))
        .collect();
    let mut out = ClassExpr::zero();
    for code in 0..3usize.pow(r as u32) {
        let mut eqs: Vec<Poly> = f.eqs().to_vec();
        let mut neqs: Vec<Poly> = f.neqs().to_vec();
        let (mut sign, mut i, mut c) = (1i64, 0u32, code);
        let mut extra = 0;
        for (k, rk) in f.pos().iter().enumerate() {
            match c % 3 {
                0 => {
                    eqs.push(&cover_square(&covers[k]) - rk);
                    i += 1;
                    extra += 1;
                }
                1 => {
                    eqs.push(&cover_square(&covers[k]) + rk);
                    sign = -sign;
                    i += 1;
                    extra += 1;
                }
                _ => neqs.push(rk.clone()),
            }
            c /= 3;
        }
        let d = Descriptor::new(eqs, neqs);
        let used = d.as_ref().map_or(0, |d| d.dim_ambient()) as i64;
        let coef = Dyadic::from_int(sign) * Dyadic::inv_pow2(r as u32 + i);
        out = &out + &ClassExpr::descriptor(d, n + extra - used).scale(&coef);
    }
    out
}

/// Inductive form: `[A, R>0] = 1/4([A, Y^2=R] - [A, Y^2=-R]) + 1/2 [A, R!=0]`,
/// eliminating inequalities in list order.
pub fn chi_inductive(f: &BasicFormula) -> ClassExpr {
    if f.has_geq() {
        return f
            .expand_geq()
            .iter()
            .map(chi_inductive)
            .fold(ClassExpr::zero(), |a, b| a + b);
    }
    if f.pos().is_empty() {
        return algebraic_class(f);
    }
    let r = f.pos()[0].clone();
    let rest = f.without_pos(0);
    let taken: Vec<&Var> = f.vars().iter().filter(|v| is_cover(v)).collect();
    let y = Var::new(&format!("{COVER_PREFIX}i{}", taken.len() + 1));
    let mut vars = rest.vars().to_vec();
    vars.push(y.clone());
    let lifted = BasicFormula::from_parts(
        vars,
        rest.eqs().iter().cloned(),
        rest.neqs().iter().cloned(),
        rest.pos().iter().cloned(),
    );
    let plus = lifted.clone().with_eq(&cover_square(&y) - &r);
    let minus = lifted.with_eq(&cover_square(&y) + &r);
    let nonzero = rest.with_neq(r);
    let quarter = Dyadic::inv_pow2(2);
    let half = Dyadic::inv_pow2(1);
    &(&chi_inductive(&plus) - &chi_inductive(&minus)).scale(&quarter)
        + &chi_inductive(&nonzero).scale(&half)
}

/// `[A, R >= 0] := [A, R > 0] + [A, R = 0]`, applied to every `>=`.
pub fn measure_geq(f: &BasicFormula) -> ClassExpr {
    f.expand_geq()
        .iter()
        .map(chi_closed_form)
        .fold(ClassExpr::zero(), |a, b| a + b)
}

/// `[A, S != 0] = [A] - [A, S = 0]`, fully expanded.
pub fn eliminate_neq(c: &ClassExpr) -> ClassExpr {
    c.map_atoms(|a| match &a.desc {
        None => ClassExpr::l_pow(a.l),
        Some(d) => expand_descriptor(d).mul_l(a.l),
    })
}

fn expand_descriptor(d: &Descriptor) -> ClassExpr {
    let neqs = d.neqs();
    let base_vars = d.vars().len() as i64;
    let mut out = ClassExpr::zero();
    for mask in 0..1u64 << neqs.len() {
        let extra: Vec<Poly> = (0..neqs.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| neqs[k].clone())
            .collect();
        let sign = if extra.len().is_multiple_of(2) { 1 } else { -1 };
        let e = Descriptor::new(d.eqs().iter().cloned().chain(extra), std::iter::empty());
        let used = e.as_ref().map_or(0, |e| e.dim_ambient()) as i64;
        out = &out + &ClassExpr::descriptor(e, base_vars - used).scale(&Dyadic::from_int(sign));
    }
    out
}

/// Identifies each descriptor with its image under `X -> -X` (cover variables fixed),
/// choosing the smaller of the two canonical forms.
pub fn odd_symmetry(c: &ClassExpr) -> ClassExpr {
    c.map_atoms(|a| {
        let desc = a.desc.as_ref().map(|d| {
            let n = d.negate_original();
            if n < *d {
                n
            } else {
                d.clone()
            }
        });
        ClassExpr::descriptor(desc, a.l)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> BasicFormula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn algebraic_formula_is_single_atom() {
        let c = chi_closed_form(&f("vars x, y; x*y - 1 = 0"));
        assert_eq!(c.terms().count(), 1);
    }

    #[test]
    fn nine_atoms_for_two_inequalities() {
        let c = chi_closed_form(&f("vars x; x > 0, x + 1 > 0"));
        assert_eq!(c.terms().count(), 9);
        assert!(c.max_two_exponent() <= 4);
    }

    #[test]
    fn forms_agree_on_small_cases() {
        for s in [
            "vars x; x > 0",
            "vars x; x > 0, x + 1 > 0",
            "vars x, y; x*y - 1 = 0, x^2 + y > 0, y != 0",
            "vars x; x^2 + 1 > 0, -x^2 - 1 > 0",
        ] {
            let g = f(s);
            assert_eq!(
                eliminate_neq(&chi_closed_form(&g)),
                eliminate_neq(&chi_inductive(&g)),
                "{s}"
            );
        }
    }

    #[test]
    fn odd_polynomial_symmetry() {
        let c = odd_symmetry(&chi_closed_form(&f("vars x; x^3 - x > 0")));
        let expect = chi_closed_form(&f("vars x; x^3 - x != 0")).scale(&Dyadic::inv_pow2(1));
        assert_eq!(c, expect);
    }

    #[test]
    fn neq_expansion() {
        let c = eliminate_neq(&algebraic_class(&f("vars x, y; x != 0, y != 0")));
        assert_eq!(c.terms().count(), 4);
    }
}
