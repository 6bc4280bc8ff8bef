//! Basic semialgebraic formulas: conjunctions of `P = 0`, `Q != 0`, `R > 0`
//! (and the `R >= 0` sugar) over a declared list of variables.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::poly::{Poly, Var};

pub use parser::{parse_formula, parse_poly, parse_poly_free, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Neq,
    Gt,
    Lt,
    Geq,
    Leq,
}

/// How `product_formula` treats variables that occur on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenameMode {
    Forbid,
    /// Append `'` to clashing names of the right factor until they are fresh.
    Prime,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variables {0:?} occur in both factors")]
    Overlap(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicFormula {
    vars: Vec<Var>,
    eqs: Vec<Poly>,
    neqs: Vec<Poly>,
    pos: Vec<Poly>,
    geqs: Vec<Poly>,
}

fn insert_sorted(list: &mut Vec<Poly>, p: Poly) {
    if let Err(i) = list.binary_search(&p) {
        list.insert(i, p);
    }
}

/// Keeps repeats: the measure of a formula depends on its inequality list.
fn insert_multi(list: &mut Vec<Poly>, p: Poly) {
    let i = list.partition_point(|q| q <= &p);
    list.insert(i, p);
}

impl BasicFormula {
    /// The formula with no constraints on the given variables.
    pub fn new(vars: Vec<Var>) -> Self {
        BasicFormula {
            vars,
            eqs: Vec::new(),
            neqs: Vec::new(),
            pos: Vec::new(),
            geqs: Vec::new(),
        }
    }

    pub fn from_parts(
        vars: Vec<Var>,
        eqs: impl IntoIterator<Item = Poly>,
        neqs: impl IntoIterator<Item = Poly>,
        pos: impl IntoIterator<Item = Poly>,
    ) -> Self {
        let mut f = BasicFormula::new(vars);
        eqs.into_iter().for_each(|p| f.add_eq(p));
        neqs.into_iter().for_each(|p| f.add_neq(p));
        pos.into_iter().for_each(|p| f.add_pos(p));
        f
    }

    /// Adds `p rel 0`.
    pub fn add_constraint(&mut self, p: Poly, rel: Relation) {
        match rel {
            Relation::Eq => self.add_eq(p),
            Relation::Neq => self.add_neq(p),
            Relation::Gt => self.add_pos(p),
            Relation::Lt => self.add_pos(-p),
            Relation::Geq => self.add_geq(p),
            Relation::Leq => self.add_geq(-p),
        }
    }

    pub fn add_eq(&mut self, p: Poly) {
        if !p.is_zero() {
            insert_sorted(&mut self.eqs, p.monic());
        }
    }

    pub fn add_neq(&mut self, p: Poly) {
        let p = if p.is_zero() { p } else { p.monic() };
        insert_sorted(&mut self.neqs, p);
    }

    pub fn add_pos(&mut self, p: Poly) {
        insert_multi(&mut self.pos, p.unit_leading());
    }

    pub fn add_geq(&mut self, p: Poly) {
        insert_multi(&mut self.geqs, p.unit_leading());
    }

    pub fn with_eq(mut self, p: Poly) -> Self {
        self.add_eq(p);
        self
    }

    pub fn with_neq(mut self, p: Poly) -> Self {
        self.add_neq(p);
        self
    }

    pub fn with_pos(mut self, p: Poly) -> Self {
        self.add_pos(p);
        self
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn eqs(&self) -> &[Poly] {
        &self.eqs
    }

    pub fn neqs(&self) -> &[Poly] {
        &self.neqs
    }

    pub fn pos(&self) -> &[Poly] {
        &self.pos
    }

    pub fn geqs(&self) -> &[Poly] {
        &self.geqs
    }

    pub fn has_geq(&self) -> bool {
        !self.geqs.is_empty()
    }

    /// Every polynomial occurring in a constraint.
    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.eqs
            .iter()
            .chain(&self.neqs)
            .chain(&self.pos)
            .chain(&self.geqs)
    }

    /// Drops the `k`-th strict inequality.
    pub fn without_pos(&self, k: usize) -> Self {
        let mut f = self.clone();
        f.pos.remove(k);
        f
    }

    /// Replaces each `R >= 0` by the pair `R > 0`, `R = 0`; returns all `2^g` branches.
    pub fn expand_geq(&self) -> Vec<BasicFormula> {
        let mut base = self.clone();
        base.geqs.clear();
        let mut out = vec![base];
        for r in &self.geqs {
            out = out
                .into_iter()
                .flat_map(|f| [f.clone().with_pos(r.clone()), f.with_eq(r.clone())])
                .collect();
        }
        out
    }

    /// Negates the sign of every strict inequality.
    pub fn flip_signs(&self) -> Self {
        let mut f = BasicFormula::new(self.vars.clone());
        f.eqs = self.eqs.clone();
        f.neqs = self.neqs.clone();
        for p in &self.pos {
            f.add_pos(-p);
        }
        for p in &self.geqs {
            f.add_geq(-p);
        }
        f
    }

    /// Renames variables, re-canonicalizing every constraint.
    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Self {
        let mut out = BasicFormula::new(self.vars.iter().map(&f).collect());
        for p in &self.eqs {
            out.add_eq(p.rename(&f));
        }
        for p in &self.neqs {
            out.add_neq(p.rename(&f));
        }
        for p in &self.pos {
            out.add_pos(p.rename(&f));
        }
        for p in &self.geqs {
            out.add_geq(p.rename(&f));
        }
        out
    }

    /// Conjunction with disjoint variable blocks.
    pub fn product(&self, other: &BasicFormula, mode: RenameMode) -> Result<Self, FormulaError> {
        let mine: BTreeSet<&Var> = self.vars.iter().collect();
        let clash: Vec<String> = other
            .vars
            .iter()
            .filter(|v| mine.contains(v))
            .map(|v| v.to_string())
            .collect();
        let other = if clash.is_empty() {
            other.clone()
        } else if mode == RenameMode::Forbid {
            return Err(FormulaError::Overlap(clash));
        } else {
            let mut taken: BTreeSet<String> = self
                .vars
                .iter()
                .chain(&other.vars)
                .map(|v| v.to_string())
                .collect();
            let mut map = std::collections::BTreeMap::new();
            for v in &other.vars {
                if mine.contains(v) {
                    let mut name = format!("{v}'");
                    while taken.contains(&name) {
                        name.push('\'');
                    }
                    taken.insert(name.clone());
                    map.insert(v.clone(), Var::new(&name));
                }
            }
            other.rename(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
        };
        let mut out = self.clone();
        out.vars.extend(other.vars.iter().cloned());
        other.eqs.iter().for_each(|p| out.add_eq(p.clone()));
        other.neqs.iter().for_each(|p| out.add_neq(p.clone()));
        other.pos.iter().for_each(|p| out.add_pos(p.clone()));
        other.geqs.iter().for_each(|p| out.add_geq(p.clone()));
        Ok(out)
    }
}

/// `[A, B] = [A]·[B]` on the formula level.
pub fn product_formula(
    a: &BasicFormula,
    b: &BasicFormula,
    mode: RenameMode,
) -> Result<BasicFormula, FormulaError> {
    a.product(b, mode)
}

impl fmt::Display for BasicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("vars")?;
        for (k, v) in self.vars.iter().enumerate() {
            write!(f, "{}{v}", if k == 0 { " " } else { ", " })?;
        }
        f.write_str(";")?;
        let parts: Vec<String> = self
            .eqs
            .iter()
            .map(|p| format!("{p} = 0"))
            .chain(self.neqs.iter().map(|p| format!("{p} != 0")))
            .chain(self.pos.iter().map(|p| format!("{p} > 0")))
            .chain(self.geqs.iter().map(|p| format!("{p} >= 0")))
            .collect();
        if parts.is_empty() {
            f.write_str(" 0 = 0")
        } else {
            write!(f, " {}", parts.join(", "))
        }
    }
}

impl std::str::FromStr for BasicFormula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn x() -> Poly {
        Poly::var("x")
    }

    #[test]
    fn parses_simple_examples() {
        let f = parse_formula("vars x; x > 0").unwrap();
        assert_eq!(f.pos(), &[x()]);
        let g = parse_formula("vars x; x^2+1 > 0").unwrap();
        assert_eq!(g.pos(), &[x() * x() + Poly::one()]);
    }

    #[test]
    fn parses_disc_slice() {
        let f = parse_formula("vars x,y; x*y = 1/2, 1 - x^2 - y^2 > 0").unwrap();
        let y = Poly::var("y");
        assert_eq!(f.eqs(), &[&x() * &y - Poly::constant(rat(1) / rat(2))]);
        assert_eq!(f.pos(), &[Poly::one() - &x() * &x() - &y * &y]);
    }

    #[test]
    fn less_than_desugars_to_negation() {
        let f = parse_formula("vars x; x^2 + 1 < 0").unwrap();
        assert_eq!(f.pos(), &[-(x() * x()) - Poly::one()]);
        let g = parse_formula("vars x; 0 < x").unwrap();
        assert_eq!(g.pos(), &[x()]);
    }

    #[test]
    fn inequalities_keep_their_sign() {
        let a = parse_formula("vars x; x - 1 > 0").unwrap();
        let b = parse_formula("vars x; 1 - x > 0").unwrap();
        assert_ne!(a, b);
        let c = parse_formula("vars x; 2*x - 2 > 0").unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn equations_normalized_up_to_scalar() {
        let a = parse_formula("vars x; 2 - 2*x = 0").unwrap();
        let b = parse_formula("vars x; x = 1").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trivially_false_constraint_kept() {
        let f = parse_formula("vars x; 1 = 0").unwrap();
        assert_eq!(f.eqs().len(), 1);
        let g = parse_formula("vars x; 0 = 0").unwrap();
        assert!(g.eqs().is_empty());
    }

    #[test]
    fn inequalities_are_scaled_but_kept() {
        let f = parse_formula("vars x; x > 0, 3*x > 0, x = 0, 2*x = 0").unwrap();
        assert_eq!(f.pos(), &[x(), x()]);
        assert_eq!(f.eqs().len(), 1);
    }

    #[test]
    fn geq_retained_and_expanded() {
        let f = parse_formula("vars x; x >= 0").unwrap();
        assert_eq!(f.geqs(), &[x()]);
        let branches = f.expand_geq();
        assert_eq!(branches.len(), 2);
        assert!(branches.iter().all(|b| !b.has_geq()));
    }

    #[test]
    fn round_trip() {
        for src in [
            "vars x,y; x*y = 1/2, 1 - x^2 - y^2 > 0",
            "vars a; a^3 - a != 0, -a >= 0",
            "vars x; 0 = 0",
            "vars; 0 = 0",
        ] {
            let f = parse_formula(src).unwrap();
            let again = parse_formula(&f.to_string()).unwrap();
            assert_eq!(f, again, "{src}");
        }
    }

    #[test]
    fn quarter_plane_product() {
        let a = parse_formula("vars x; x > 0").unwrap();
        let b = parse_formula("vars y; y > 0").unwrap();
        let p = product_formula(&a, &b, RenameMode::Forbid).unwrap();
        assert_eq!(p, parse_formula("vars x, y; x > 0, y > 0").unwrap());
    }

    #[test]
    fn product_unit() {
        let unit = parse_formula("vars; 0 = 0").unwrap();
        let a = parse_formula("vars x; x^2 - 2 > 0").unwrap();
        assert_eq!(product_formula(&unit, &a, RenameMode::Forbid).unwrap(), a);
    }

    #[test]
    fn product_renaming_is_explicit() {
        let a = parse_formula("vars x; x > 0").unwrap();
        assert!(product_formula(&a, &a, RenameMode::Forbid).is_err());
        let p = product_formula(&a, &a, RenameMode::Prime).unwrap();
        assert_eq!(p.to_string(), "vars x, x'; x > 0, x' > 0");
    }
}
