use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Rational, Var};

/// Sparse multivariate polynomial over ℚ. No zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Poly::monomial(Monomial::var(v.into(), 1), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::one()).cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Leading term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Terms sorted by descending grlex order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| b.0.grlex_cmp(a.0));
        t
    }

    /// `Some(d)` when every term has total degree `d` (the zero polynomial is not homogeneous).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, k)| (n.mul(m), k.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Divides by the grlex leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&(Rational::one() / c)),
        }
    }

    /// Scales by a positive rational so that the leading coefficient is ±1.
    pub fn unit_leading(&self) -> Poly {
        match self.leading_term() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&(Rational::one() / c.abs())),
        }
    }

    /// Scales to integer coefficients with unit content and positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut s = Rational::new(den, num);
        if self.leading_coeff().is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    /// Substitutes `v := q`.
    pub fn substitute(&self, v: &Var, q: &Poly) -> Poly {
        let mut cache: BTreeMap<u32, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let qe = cache.entry(e).or_insert_with(|| q.pow(e)).clone();
            out = &out + &qe.mul_monomial(&rest).scale(c);
        }
        out
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_all(&self, map: &BTreeMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.pairs() {
                let f = match map.get(v) {
                    Some(q) => q.pow(*e),
                    None => Poly::monomial(Monomial::var(v.clone(), *e), Rational::one()),
                };
                t = &t * &f;
            }
            out = &out + &t;
        }
        out
    }

    pub fn eval_var(&self, v: &Var, x: &Rational) -> Poly {
        self.substitute(v, &Poly::constant(x.clone()))
    }

    /// Full evaluation; `None` if a variable is missing from `point`.
    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.pairs() {
                let x = point.get(v)?;
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            if e > 0 {
                out.add_term(
                    rest.mul(&Monomial::var(v.clone(), e - 1)),
                    c * rat(e as i64),
                );
            }
        }
        out
    }

    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// `p(x) -> p(-x)` for every variable in `vars`.
    pub fn negate_vars(&self, vars: &BTreeSet<Var>) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let odd: u32 = m
                .pairs()
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(_, e)| e)
                .sum();
            (m.clone(), if odd % 2 == 1 { -c.clone() } else { c.clone() })
        }))
    }

    /// Coefficients as a polynomial in `v`: index `i` holds the coefficient of `v^i`.
    pub fn coeffs_in(&self, v: &Var) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            out = &out + &c.mul_monomial(&Monomial::var(v.clone(), i as u32));
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            let t = Poly::monomial(qm, qc);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Exact square root when `self` is the square of a polynomial with leading coefficient > 0.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (lm, lc) = self.leading_term()?;
        let root_m = Monomial::from_pairs(
            lm.pairs()
                .iter()
                .map(|(v, e)| (e % 2 == 0).then(|| (v.clone(), e / 2)))
                .collect::<Option<Vec<_>>>()?,
        );
        let root_c = rational_sqrt(lc)?;
        let mut root = Poly::monomial(root_m.clone(), root_c.clone());
        let lead2 = Poly::monomial(root_m, root_c * rat(2));
        for _ in 0..=self.num_terms() {
            let rem = self - &(&root * &root);
            if rem.is_zero() {
                return Some(root);
            }
            let (m, c) = rem.leading_term()?;
            let (lm2, lc2) = lead2.leading_term()?;
            let t = Poly::monomial(m.div(lm2)?, c / lc2);
            root = &root + &t;
        }
        None
    }

    /// Writes the polynomial in the formula grammar.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                *acc.entry(a.mul(b)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var("x")
    }
    fn y() -> Poly {
        Poly::var("y")
    }

    #[test]
    fn difference_of_squares() {
        let p = (x() + y()) * (x() - y());
        assert_eq!(p, x() * x() - y() * y());
        assert_eq!(p.to_string(), "x^2 - y^2");
    }

    #[test]
    fn substitution() {
        let p = x() * y();
        assert_eq!(p.substitute(&Var::new("y"), &x()), x() * x());
    }

    #[test]
    fn homogeneity() {
        assert_eq!((x() * x() - y() * y()).homogeneous_degree(), Some(2));
        assert_eq!((x() * x() - y()).homogeneous_degree(), None);
    }

    #[test]
    fn degrees_and_derivative() {
        let p = x().pow(3) * y() + Poly::int(2) * y().pow(2);
        assert_eq!(p.total_degree(), 4);
        assert_eq!(p.degree_in(&Var::new("x")), 3);
        assert_eq!(
            p.derivative(&Var::new("x")),
            Poly::int(3) * x().pow(2) * y()
        );
    }

    #[test]
    fn exact_division_and_sqrt() {
        let a = x() * x() - y() * y();
        assert_eq!(a.div_exact(&(x() - y())), Some(x() + y()));
        assert_eq!(a.div_exact(&(x() + Poly::one())), None);
        let s = (x() * y() - Poly::int(3) * x()).pow(2);
        let r = s.sqrt_exact().unwrap();
        assert_eq!(&r * &r, s);
        assert!((x() * x() + Poly::one()).sqrt_exact().is_none());
    }

    #[test]
    fn coefficient_view_round_trips() {
        let p = x().pow(2) * y() - x() + Poly::int(5);
        let c = p.coeffs_in(&Var::new("x"));
        assert_eq!(c.len(), 3);
        assert_eq!(Poly::from_coeffs(&Var::new("x"), &c), p);
    }

    #[test]
    fn primitive_normalization() {
        let p = Poly::constant(Rational::new((-2).into(), 3.into())) * x() + Poly::int(4);
        assert_eq!(p.primitive(), x() - Poly::int(6));
    }
}
