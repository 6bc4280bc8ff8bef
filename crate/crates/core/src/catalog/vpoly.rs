use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::formula::{parse_poly, ParseError};
use crate::k0::ClassExpr;
use crate::poly::{Dyadic, Rational, Var};

/// A Laurent polynomial in `u` with dyadic coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VirtualPoly {
    coeffs: BTreeMap<i64, Dyadic>,
}

impl VirtualPoly {
    pub fn zero() -> Self {
        VirtualPoly::default()
    }

    pub fn one() -> Self {
        VirtualPoly::int(1)
    }

    pub fn int(n: i64) -> Self {
        VirtualPoly::monomial(0, Dyadic::from_int(n))
    }

    /// `u`.
    pub fn u() -> Self {
        VirtualPoly::u_pow(1)
    }

    pub fn u_pow(k: i64) -> Self {
        VirtualPoly::monomial(k, Dyadic::one())
    }

    pub fn monomial(k: i64, c: Dyadic) -> Self {
        let mut v = VirtualPoly::zero();
        v.add_term(k, c);
        v
    }

    /// From integer coefficients, lowest degree first.
    pub fn from_ints(cs: &[i64]) -> Self {
        let mut v = VirtualPoly::zero();
        for (k, c) in cs.iter().enumerate() {
            v.add_term(k as i64, Dyadic::from_int(*c));
        }
        v
    }

    fn add_term(&mut self, k: i64, c: Dyadic) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert_with(Dyadic::zero);
        *slot += &c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &Dyadic)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> Dyadic {
        self.coeffs.get(&k).cloned().unwrap_or_else(Dyadic::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Dyadic) -> Self {
        let mut out = VirtualPoly::zero();
        for (k, d) in &self.coeffs {
            out.add_term(*k, d * c);
        }
        out
    }

    pub fn shift(&self, k: i64) -> Self {
        VirtualPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(VirtualPoly::one(), |acc, _| &acc * self)
    }

    /// Value at a nonzero rational `u`.
    pub fn eval(&self, u: &Rational) -> Rational {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let p = if *k >= 0 {
                    num_traits::pow(u.clone(), *k as usize)
                } else {
                    num_traits::pow(u.recip(), (-*k) as usize)
                };
                c.to_rational() * p
            })
            .sum()
    }

    /// The value at `u = -1`, which is `χ_c`.
    pub fn at_minus_one(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (k, c) in &self.coeffs {
            if k.rem_euclid(2) == 0 {
                acc += c;
            } else {
                acc += &-c;
            }
        }
        acc
    }

    /// `u -> L`.
    pub fn to_class(&self) -> ClassExpr {
        ClassExpr::l_poly(self.coeffs.iter().map(|(k, c)| (*k, c.clone())))
    }

    /// Inverse of `to_class` on `L`-polynomials.
    pub fn from_class(c: &ClassExpr) -> Option<Self> {
        let mut v = VirtualPoly::zero();
        for (a, d) in c.terms() {
            if a.desc.is_some() {
                return None;
            }
            v.add_term(a.l, d.clone());
        }
        Some(v)
    }

    /// Parses a polynomial in `u` whose coefficients are dyadic.
    pub fn parse(text: &str) -> Result<Self, VpolyParseError> {
        VirtualPoly::parse_in(text, "u")
    }

    /// Same as `parse` with another name for the indeterminate.
    pub fn parse_in(text: &str, var: &str) -> Result<Self, VpolyParseError> {
        let p = parse_poly(text, &[var]).map_err(VpolyParseError::Syntax)?;
        let u = Var::new(var);
        let mut v = VirtualPoly::zero();
        for (m, c) in p.terms() {
            let d = Dyadic::from_rational(c)
                .ok_or_else(|| VpolyParseError::NotDyadic(text.to_string()))?;
            v.add_term(m.degree_in(&u) as i64, d);
        }
        Ok(v)
    }

    /// Common-denominator rendering such as `(5*u - 11)/16`.
    pub fn fraction_string(&self) -> String {
        let e = self
            .coeffs
            .values()
            .map(|c| c.exponent())
            .max()
            .unwrap_or(0);
        if e == 0 {
            return self.to_string();
        }
        let den = BigInt::one() << e;
        let scaled = self.scale(&Dyadic::new(den.clone(), 0));
        let body = scaled.to_string();
        if scaled.coeffs.len() == 1 && !body.starts_with('-') {
            format!("{body}/{den}")
        } else {
            format!("({body})/{den}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VpolyParseError {
    #[error("{0}")]
    Syntax(ParseError),
    #[error("`{0}` has a coefficient that is not dyadic")]
    NotDyadic(String),
}

impl Add for &VirtualPoly {
    type Output = VirtualPoly;
    fn add(self, rhs: &VirtualPoly) -> VirtualPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &VirtualPoly {
    type Output = VirtualPoly;
    fn sub(self, rhs: &VirtualPoly) -> VirtualPoly {
        self + &(-rhs)
    }
}

impl Neg for &VirtualPoly {
    type Output = VirtualPoly;
    fn neg(self) -> VirtualPoly {
        self.scale(&Dyadic::from_int(-1))
    }
}

impl Mul for &VirtualPoly {
    type Output = VirtualPoly;
    fn mul(self, rhs: &VirtualPoly) -> VirtualPoly {
        let mut out = VirtualPoly::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for VirtualPoly {
            type Output = VirtualPoly;
            fn $f(self, rhs: VirtualPoly) -> VirtualPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for VirtualPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.coeffs.iter().rev().enumerate() {
            let q = c.to_rational();
            let neg = q.is_negative();
            let a = q.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = match k {
                0 => String::new(),
                1 => "u".to_string(),
                k => format!("u^{k}"),
            };
            let coef = crate::poly::fmt_rational(&a);
            match (mono.is_empty(), a.is_one()) {
                (true, _) => f.write_str(&coef)?,
                (false, true) => f.write_str(&mono)?,
                (false, false) => write!(f, "{coef}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for VirtualPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
