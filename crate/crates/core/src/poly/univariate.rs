//! Dense univariate polynomials over ℚ and Sturm-based real root isolation.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::{Monomial, Poly, PolyError, Rational, Var};

/// Dense coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly(Vec<Rational>);

/// An isolated real root: either known exactly or strictly inside `(lo, hi)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RootInterval {
    Exact(Rational),
    Open(Rational, Rational),
}

impl RootInterval {
    pub fn lo(&self) -> &Rational {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open(lo, _) => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open(_, hi) => hi,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            RootInterval::Exact(q) => q == x,
            RootInterval::Open(lo, hi) => lo < x && x < hi,
        }
    }
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&n| super::rat(n)).collect())
    }

    /// Views `p` as univariate in `v`; fails if another variable occurs.
    pub fn from_poly(p: &Poly, v: &Var) -> Result<Self, PolyError> {
        let mut coeffs = vec![Rational::zero(); p.degree_in(v) as usize + 1];
        for (m, c) in p.terms() {
            let (rest, e) = m.without(v);
            if !rest.is_one() {
                return Err(PolyError::NotUnivariate(p.to_string()));
            }
            coeffs[e as usize] = c.clone();
        }
        Ok(UPoly::new(coeffs))
    }

    pub fn to_poly(&self, v: &Var) -> Poly {
        Poly::from_terms(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(v.clone(), i as u32), c.clone())),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        sign(&self.eval(x))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * super::rat(i as i64))
                .collect(),
        )
    }

    fn scale(&self, c: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> UPoly {
        self.scale(&-Rational::one())
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut rem = self.0.clone();
        let lc = d.leading();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let f = rem.last().unwrap() / &lc;
            for (i, c) in d.0.iter().enumerate() {
                rem[k + i] -= &f * c;
            }
            q[k] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UPoly::new(q), UPoly::new(rem))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            seq.push(r);
        }
        seq.pop();
        seq
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    pub fn root_bound(&self) -> Rational {
        let lc = self.leading().abs();
        let m = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.squarefree_part().sturm_sequence();
        let at_neg: Vec<i32> = seq
            .iter()
            .map(|p| {
                let s = sign(&p.leading());
                if p.degree().unwrap_or(0) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        let at_pos: Vec<i32> = seq.iter().map(|p| sign(&p.leading())).collect();
        variations(&at_neg) - variations(&at_pos)
    }

    /// Isolates every distinct real root, sorted ascending.
    pub fn isolate_roots(&self) -> Result<Vec<RootInterval>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let sf = self.squarefree_part();
        let seq = sf.sturm_sequence();
        let b = sf.root_bound();
        let mut out = Vec::new();
        let n = count_open(&sf, &seq, &-b.clone(), &b);
        sf.isolate_in(&seq, -b.clone(), b, n, &mut out);
        Ok(out)
    }

    fn isolate_in(
        &self,
        seq: &[UPoly],
        lo: Rational,
        hi: Rational,
        count: usize,
        out: &mut Vec<RootInterval>,
    ) {
        match count {
            0 => {}
            1 => {
                // endpoints may be roots of the polynomial; shrink until they are not
                let (mut lo, mut hi) = (lo, hi);
                while self.eval(&lo).is_zero() || self.eval(&hi).is_zero() {
                    let mid = (&lo + &hi) / super::rat(2);
                    if self.eval(&mid).is_zero() {
                        out.push(RootInterval::Exact(mid));
                        return;
                    }
                    if count_open(self, seq, &lo, &mid) == 1 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                out.push(RootInterval::Open(lo, hi));
            }
            _ => {
                let mid = (&lo + &hi) / super::rat(2);
                let left = count_open(self, seq, &lo, &mid);
                let at_mid = self.eval(&mid).is_zero();
                self.isolate_in(seq, lo, mid.clone(), left, out);
                if at_mid {
                    out.push(RootInterval::Exact(mid.clone()));
                }
                let right = count - left - usize::from(at_mid);
                self.isolate_in(seq, mid, hi, right, out);
            }
        }
    }

    /// Shrinks an isolating interval by one bisection step.
    pub fn refine(&self, r: &RootInterval) -> RootInterval {
        match r {
            RootInterval::Exact(_) => r.clone(),
            RootInterval::Open(lo, hi) => {
                let mid = (lo + hi) / super::rat(2);
                if self.eval(&mid).is_zero() {
                    return RootInterval::Exact(mid);
                }
                let sf = self.squarefree_part();
                if sf.sign_at(lo) * sf.sign_at(&mid) < 0 {
                    RootInterval::Open(lo.clone(), mid)
                } else {
                    RootInterval::Open(mid, hi.clone())
                }
            }
        }
    }

    /// Compares the root isolated by `r` with a rational.
    pub fn cmp_root(&self, r: &RootInterval, x: &Rational) -> Ordering {
        let mut r = r.clone();
        loop {
            match &r {
                RootInterval::Exact(q) => return q.cmp(x),
                RootInterval::Open(lo, hi) => {
                    if x <= lo {
                        return Ordering::Greater;
                    }
                    if x >= hi {
                        return Ordering::Less;
                    }
                    if self.eval(x).is_zero() {
                        return Ordering::Equal;
                    }
                    r = self.refine(&r);
                }
            }
        }
    }
}

pub(crate) fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn variations(signs: &[i32]) -> usize {
    let mut last = 0;
    let mut v = 0;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

fn variations_at(seq: &[UPoly], x: &Rational) -> usize {
    variations(&seq.iter().map(|p| p.sign_at(x)).collect::<Vec<_>>())
}

/// Distinct roots in the open interval `(lo, hi)`.
fn count_open(p: &UPoly, seq: &[UPoly], lo: &Rational, hi: &Rational) -> usize {
    let half_open = variations_at(seq, lo) - variations_at(seq, hi);
    half_open - usize::from(p.eval(hi).is_zero())
}

/// Isolates the distinct real roots of a univariate polynomial.
pub fn sturm_isolate(p: &Poly) -> Result<Vec<RootInterval>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let vars = p.vars();
    if vars.len() > 1 {
        return Err(PolyError::NotUnivariate(p.to_string()));
    }
    match vars.into_iter().next() {
        None => Ok(Vec::new()),
        Some(v) => UPoly::from_poly(p, &v)?.isolate_roots(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn two_roots() {
        let p = UPoly::from_ints(&[-1, 0, 1]);
        let roots = p.isolate_roots().unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi() <= &r(0, 1) && roots[0].lo() >= &r(-2, 1));
        assert!(roots[1].lo() >= &r(0, 1) && roots[1].hi() <= &r(2, 1));
    }

    #[test]
    fn no_real_roots() {
        assert!(UPoly::from_ints(&[1, 0, 1])
            .isolate_roots()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cubic_roots_bracket_sign_changes() {
        // x^3 - x, roots -1, 0, 1
        let p = UPoly::from_ints(&[0, -1, 0, 1]);
        let roots = p.isolate_roots().unwrap();
        assert_eq!(roots.len(), 3);
        for (root, expect) in roots.iter().zip([-1, 0, 1]) {
            match root {
                RootInterval::Exact(q) => assert_eq!(q, &r(expect, 1)),
                RootInterval::Open(lo, hi) => {
                    // independent check: p changes sign across the interval
                    assert!(p.sign_at(lo) * p.sign_at(hi) < 0);
                    assert!(lo < &r(expect, 1) && &r(expect, 1) < hi);
                }
            }
        }
    }

    #[test]
    fn multiple_roots_counted_once() {
        // (x-1)^2 (x+2)
        let p = UPoly::from_ints(&[2, -3, 0, 1]);
        assert_eq!(p.count_real_roots(), 2);
        assert_eq!(p.isolate_roots().unwrap().len(), 2);
        assert_eq!(p.squarefree_part(), UPoly::from_ints(&[-2, 1, 1]));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(sturm_isolate(&Poly::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn compare_root_with_rational() {
        let p = UPoly::from_ints(&[-2, 0, 1]);
        let roots = p.isolate_roots().unwrap();
        assert_eq!(p.cmp_root(&roots[1], &r(7, 5)), Ordering::Greater);
        assert_eq!(p.cmp_root(&roots[1], &r(3, 2)), Ordering::Less);
    }
}
