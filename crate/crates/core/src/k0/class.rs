use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Descriptor;
use crate::poly::Dyadic;

/// `L^l` times an optional descriptor class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub l: i64,
    pub desc: Option<Descriptor>,
}

impl Atom {
    pub fn l_pow(l: i64) -> Self {
        Atom { l, desc: None }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.desc
            .cmp(&other.desc)
            .then_with(|| other.l.cmp(&self.l))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A `Z[1/2]`-linear combination of atoms, in the `L`-localized ring.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClassExpr {
    terms: BTreeMap<Atom, Dyadic>,
}

impl ClassExpr {
    pub fn zero() -> Self {
        ClassExpr::default()
    }

    pub fn one() -> Self {
        ClassExpr::l_pow(0)
    }

    pub fn int(n: i64) -> Self {
        ClassExpr::one().scale(&Dyadic::from_int(n))
    }

    /// `L^k`.
    pub fn l_pow(k: i64) -> Self {
        ClassExpr::atom(Atom::l_pow(k), Dyadic::one())
    }

    /// `L`.
    pub fn l() -> Self {
        ClassExpr::l_pow(1)
    }

    /// `L^free · [d]`; an absent descriptor is affine space.
    pub fn descriptor(d: Option<Descriptor>, free: i64) -> Self {
        ClassExpr::atom(Atom { l: free, desc: d }, Dyadic::one())
    }

    pub fn atom(a: Atom, c: Dyadic) -> Self {
        let mut e = ClassExpr::zero();
        e.add_term(a, c);
        e
    }

    /// `sum c_k L^k` from `(k, c_k)` pairs.
    pub fn l_poly(coeffs: impl IntoIterator<Item = (i64, Dyadic)>) -> Self {
        let mut e = ClassExpr::zero();
        for (k, c) in coeffs {
            e.add_term(Atom::l_pow(k), c);
        }
        e
    }

    pub fn add_term(&mut self, a: Atom, c: Dyadic) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(a.clone()).or_insert_with(Dyadic::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &Dyadic)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no descriptor atom occurs.
    pub fn is_l_poly(&self) -> bool {
        self.terms.keys().all(|a| a.desc.is_none())
    }

    pub fn scale(&self, c: &Dyadic) -> Self {
        let mut out = ClassExpr::zero();
        for (a, d) in &self.terms {
            out.add_term(a.clone(), d * c);
        }
        out
    }

    pub fn mul_l(&self, k: i64) -> Self {
        ClassExpr {
            terms: self
                .terms
                .iter()
                .map(|(a, c)| {
                    (
                        Atom {
                            l: a.l + k,
                            desc: a.desc.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(ClassExpr::one(), |acc, _| &acc * self)
    }

    /// Applies `f` to every descriptor, keeping coefficients and `L`-powers.
    pub fn map_atoms(&self, f: impl Fn(&Atom) -> ClassExpr) -> Self {
        let mut out = ClassExpr::zero();
        for (a, c) in &self.terms {
            out = &out + &f(a).scale(c);
        }
        out
    }

    /// Largest power of two in a denominator.
    pub fn max_two_exponent(&self) -> u32 {
        self.terms.values().map(|c| c.exponent()).max().unwrap_or(0)
    }
}

fn mul_atoms(a: &Atom, b: &Atom) -> Atom {
    let desc = match (&a.desc, &b.desc) {
        (None, d) | (d, None) => d.clone(),
        (Some(x), Some(y)) => Some(x.product(y)),
    };
    Atom { l: a.l + b.l, desc }
}

impl Add for &ClassExpr {
    type Output = ClassExpr;
    fn add(self, rhs: &ClassExpr) -> ClassExpr {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ClassExpr {
    type Output = ClassExpr;
    fn sub(self, rhs: &ClassExpr) -> ClassExpr {
        self + &(-rhs)
    }
}

impl Neg for &ClassExpr {
    type Output = ClassExpr;
    fn neg(self) -> ClassExpr {
        self.scale(&Dyadic::from_int(-1))
    }
}

impl Mul for &ClassExpr {
    type Output = ClassExpr;
    fn mul(self, rhs: &ClassExpr) -> ClassExpr {
        let mut out = ClassExpr::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(mul_atoms(a, b), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for ClassExpr {
            type Output = ClassExpr;
            fn $f(self, rhs: ClassExpr) -> ClassExpr {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&ClassExpr> for ClassExpr {
            type Output = ClassExpr;
            fn $f(self, rhs: &ClassExpr) -> ClassExpr {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ClassExpr {
    type Output = ClassExpr;
    fn neg(self) -> ClassExpr {
        -&self
    }
}

fn fmt_atom(a: &Atom) -> String {
    let l = match a.l {
        0 => None,
        1 => Some("L".to_string()),
        k => Some(format!("L^{k}")),
    };
    match (l, &a.desc) {
        (None, None) => String::new(),
        (Some(l), None) => l,
        (None, Some(d)) => d.to_string(),
        (Some(l), Some(d)) => format!("{l}*{d}"),
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (a, c)) in self.terms.iter().enumerate() {
            let neg = c.signum() < 0;
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let body = fmt_atom(a);
            let one = abs == Dyadic::one();
            match (body.is_empty(), one) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => f.write_str(&body)?,
                (false, false) => write!(f, "{abs}*{body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    fn lm1() -> ClassExpr {
        &ClassExpr::l() - &ClassExpr::one()
    }

    #[test]
    fn square_of_l_minus_one() {
        let sq = &lm1() * &lm1();
        let expect = ClassExpr::l_poly([
            (2, Dyadic::one()),
            (1, Dyadic::from_int(-2)),
            (0, Dyadic::one()),
        ]);
        assert_eq!(sq, expect);
        assert_eq!(sq.to_string(), "L^2 - 2*L + 1");
    }

    #[test]
    fn quarter_sums() {
        let q = Dyadic::inv_pow2(2);
        let a = (&ClassExpr::l().scale(&Dyadic::from_int(3)) - &ClassExpr::one()).scale(&q);
        let b = (&ClassExpr::l() + &ClassExpr::one()).scale(&q);
        assert_eq!(&a + &b, ClassExpr::l());
    }

    #[test]
    fn point_times_point() {
        let x = Descriptor::new([parse_poly_free("x").unwrap()], []);
        let y = Descriptor::new([parse_poly_free("y").unwrap()], []);
        let xy = Descriptor::new(
            [parse_poly_free("x").unwrap(), parse_poly_free("y").unwrap()],
            [],
        );
        assert_eq!(
            &ClassExpr::descriptor(x, 0) * &ClassExpr::descriptor(y, 0),
            ClassExpr::descriptor(xy, 0)
        );
    }

    #[test]
    fn dyadic_rendering() {
        let half = (&ClassExpr::l() - &ClassExpr::one()).scale(&Dyadic::inv_pow2(1));
        assert_eq!(half.to_string(), "1/2^1*L - 1/2^1");
        assert_eq!(ClassExpr::l_pow(-2).to_string(), "L^-2");
    }
}
