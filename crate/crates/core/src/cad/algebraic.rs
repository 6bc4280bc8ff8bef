//! Sample coordinates that are rational or real algebraic over the field
//! generated by the previous coordinates, with exact sign determination.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{rat, Poly, Rational, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Interval {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(Rational::one());
        }
        let a = pow_rat(&self.lo, e);
        let b = pow_rat(&self.hi, e);
        if e.is_multiple_of(2) && self.lo.is_negative() && self.hi.is_positive() {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else {
            Interval {
                lo: a.clone().min(b.clone()),
                hi: a.max(b),
            }
        }
    }

    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn abs_upper(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn abs_lower(&self) -> Rational {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -self.hi.clone()
        } else {
            Rational::zero()
        }
    }
}

fn pow_rat(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

/// A real root of `poly(α_1, .., α_{k-1}, x_k)`, the only one in `(lo, hi)`.
///
/// `sturm` is a Sturm sequence of that univariate polynomial over the field
/// of the earlier coordinates; its sign variations count roots.
#[derive(Clone, Debug)]
pub struct RootCoord {
    pub poly: Poly,
    pub lo: Rational,
    pub hi: Rational,
    pub sturm: Vec<Poly>,
}

#[derive(Clone, Debug)]
pub enum Coord {
    Rat(Rational),
    Root(Box<RootCoord>),
}

impl Coord {
    pub fn interval(&self) -> Interval {
        match self {
            Coord::Rat(q) => Interval::point(q.clone()),
            Coord::Root(r) => Interval {
                lo: r.lo.clone(),
                hi: r.hi.clone(),
            },
        }
    }

    /// `(lower bound, bound is attained)` and `(upper bound, attained)`.
    fn bounds(&self) -> ((Rational, bool), (Rational, bool)) {
        match self {
            Coord::Rat(q) => ((q.clone(), true), (q.clone(), true)),
            Coord::Root(r) => ((r.lo.clone(), false), (r.hi.clone(), false)),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Rat(q) => write!(f, "{}", crate::poly::fmt_rational(q)),
            Coord::Root(r) => write!(
                f,
                "root of {} in ({}, {})",
                r.poly,
                crate::poly::fmt_rational(&r.lo),
                crate::poly::fmt_rational(&r.hi)
            ),
        }
    }
}

/// Exact sign evaluation at points whose coordinates are bound to `vars`.
pub struct Field<'a> {
    pub vars: &'a [Var],
}

type Univ = Vec<Poly>;

impl<'a> Field<'a> {
    /// Substitutes every rational coordinate of `pt` into `p`.
    fn subst_rational(&self, p: &Poly, pt: &[Coord]) -> Poly {
        let mut q = p.clone();
        for (i, c) in pt.iter().enumerate() {
            if let Coord::Rat(x) = c {
                if q.contains_var(&self.vars[i]) {
                    q = q.eval_var(&self.vars[i], x);
                }
            }
        }
        q
    }

    fn top_index(&self, p: &Poly, len: usize) -> Option<usize> {
        (0..len).rev().find(|&i| p.contains_var(&self.vars[i]))
    }

    /// Sign of `p` at the point `pt` (`p` may only use the first `pt.len()` variables).
    pub fn sign(&self, p: &Poly, pt: &mut [Coord]) -> i32 {
        let q = self.subst_rational(p, pt);
        let Some(k) = self.top_index(&q, pt.len()) else {
            return sign_rat(&q.constant_term());
        };
        if let Some(s) = self.enclosure(&q, pt).sign() {
            return s;
        }
        if self.is_zero_at(&q, pt, k) {
            return 0;
        }
        loop {
            self.refine_all(&q, pt, k);
            if let Some(s) = self.enclosure(&q, pt).sign() {
                return s;
            }
        }
    }

    fn enclosure(&self, p: &Poly, pt: &[Coord]) -> Interval {
        let boxes: BTreeMap<&Var, Interval> = self
            .vars
            .iter()
            .zip(pt)
            .map(|(v, c)| (v, c.interval()))
            .collect();
        let mut acc = Interval::point(Rational::zero());
        for (m, c) in p.terms() {
            let mut t = Interval::point(c.clone());
            for (v, e) in m.pairs() {
                t = t.mul(&boxes[v].pow(*e));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Halves the isolating interval of every algebraic coordinate `p` depends on.
    fn refine_all(&self, p: &Poly, pt: &mut [Coord], k: usize) {
        for i in 0..=k {
            if matches!(pt[i], Coord::Root(_)) && p.contains_var(&self.vars[i]) {
                self.refine(pt, i);
            }
        }
    }

    /// Bisects the isolating interval of coordinate `i`.
    pub fn refine(&self, pt: &mut [Coord], i: usize) {
        let (prefix, rest) = pt.split_at_mut(i);
        let Coord::Root(r) = &mut rest[0] else {
            return;
        };
        let mid = (&r.lo + &r.hi) / rat(2);
        let at_mid = r.poly.eval_var(&self.vars[i], &mid);
        if self.is_zero_poly_at(&at_mid, prefix) {
            rest[0] = Coord::Rat(mid);
            return;
        }
        let v_lo = self.variations(&r.sturm, i, &r.lo, prefix);
        let v_mid = self.variations(&r.sturm, i, &mid, prefix);
        if v_lo > v_mid {
            r.hi = mid;
        } else {
            r.lo = mid;
        }
    }

    /// Sign variations of a Sturm sequence at `x_i = x`.
    fn variations(&self, seq: &[Poly], i: usize, x: &Rational, prefix: &mut [Coord]) -> usize {
        let signs: Vec<i32> = seq
            .iter()
            .map(|s| self.sign(&s.eval_var(&self.vars[i], x), prefix))
            .collect();
        crate::poly::univariate::variations(&signs)
    }

    /// Whether a polynomial in the prefix variables vanishes at `prefix`.
    fn is_zero_poly_at(&self, p: &Poly, prefix: &mut [Coord]) -> bool {
        self.sign(p, prefix) == 0
    }

    /// Exact zero test of `q(α)` where `x_k` is its highest algebraic variable.
    fn is_zero_at(&self, q: &Poly, pt: &mut [Coord], k: usize) -> bool {
        let Coord::Root(root) = pt[k].clone() else {
            unreachable!("rational coordinates are substituted")
        };
        let (prefix, _) = pt.split_at_mut(k);
        let x = &self.vars[k];
        let a = self.strip(q.coeffs_in(x), prefix);
        if a.is_empty() {
            return true;
        }
        if a.len() == 1 {
            return false;
        }
        let defining = self.subst_rational(&root.poly, prefix);
        let b = self.strip(defining.coeffs_in(x), prefix);
        let g = self.gcd(a, b, prefix);
        if g.len() <= 1 {
            return false;
        }
        let seq = self.sturm_univ(&g, prefix);
        let seq: Vec<Poly> = seq.iter().map(|c| Poly::from_coeffs(x, c)).collect();
        self.variations(&seq, k, &root.lo, prefix) > self.variations(&seq, k, &root.hi, prefix)
    }

    /// Drops leading coefficients vanishing at the point.
    fn strip(&self, mut a: Univ, prefix: &mut [Coord]) -> Univ {
        while let Some(lc) = a.last() {
            if self.sign(lc, prefix) == 0 {
                a.pop();
            } else {
                break;
            }
        }
        a
    }

    /// Pseudo-remainder; returns it with the number of multiplications by `lc(b)`.
    fn prem(&self, a: &Univ, b: &Univ) -> (Univ, u32) {
        let mut a = a.clone();
        let lb = b.last().unwrap().clone();
        let db = b.len() - 1;
        let mut e = 0;
        while a.len() > db && !a.is_empty() {
            let la = a.last().unwrap().clone();
            let shift = a.len() - 1 - db;
            for c in a.iter_mut() {
                *c = &*c * &lb;
            }
            for (j, bj) in b.iter().enumerate() {
                a[j + shift] = &a[j + shift] - &(&la * bj);
            }
            e += 1;
            a.pop();
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
        }
        (a, e)
    }

    /// gcd over the field of the prefix, up to a scalar.
    fn gcd(&self, mut a: Univ, mut b: Univ, prefix: &mut [Coord]) -> Univ {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            if b.len() == 1 {
                return b;
            }
            let (r, _) = self.prem(&a, &b);
            let r = self.strip(normalize_univ(r), prefix);
            a = b;
            b = r;
        }
        a
    }

    /// Sturm sequence `f, f', -rem, ...` over the field of the prefix.
    pub(crate) fn sturm_univ(&self, f: &Univ, prefix: &mut [Coord]) -> Vec<Univ> {
        let df: Univ = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&rat(j as i64)))
            .collect();
        let mut seq = vec![f.clone()];
        let df = self.strip(df, prefix);
        if df.is_empty() {
            return seq;
        }
        seq.push(df);
        loop {
            let n = seq.len();
            let b = &seq[n - 1];
            if b.len() == 1 {
                break;
            }
            let (r, e) = self.prem(&seq[n - 2], b);
            let s = self.sign(b.last().unwrap(), prefix);
            let flip = if s < 0 && e % 2 == 1 { 1 } else { -1 };
            let r: Univ = r.iter().map(|c| c.scale(&rat(flip))).collect();
            let r = self.strip(normalize_univ(r), prefix);
            if r.is_empty() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// All real roots of `f(α, x_k)` as isolating data, ascending.
    ///
    /// Returns `None` when `f` vanishes identically over the prefix.
    pub fn roots(&self, f: &Poly, k: usize, prefix: &mut [Coord]) -> Option<Vec<Coord>> {
        let x = &self.vars[k];
        let g = self.subst_rational(f, prefix);
        let a = self.strip(g.coeffs_in(x), prefix);
        if a.is_empty() {
            return None;
        }
        if a.len() == 1 {
            return Some(Vec::new());
        }
        let seq: Vec<Poly> = self
            .sturm_univ(&a, prefix)
            .iter()
            .map(|c| Poly::from_coeffs(x, c))
            .collect();
        let fa = Poly::from_coeffs(x, &a);
        let b = self.root_bound(&a, prefix);
        let nb = -b.clone();
        let total = self.variations(&seq, k, &nb, prefix) - self.variations(&seq, k, &b, prefix);
        let mut out = Vec::new();
        self.isolate(&fa, &seq, k, nb, b, total, prefix, &mut out);
        Some(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn isolate(
        &self,
        f: &Poly,
        seq: &[Poly],
        k: usize,
        lo: Rational,
        hi: Rational,
        count: usize,
        prefix: &mut [Coord],
        out: &mut Vec<Coord>,
    ) {
        if count == 0 {
            return;
        }
        if count == 1 {
            out.push(Coord::Root(Box::new(RootCoord {
                poly: f.clone(),
                lo,
                hi,
                sturm: seq.to_vec(),
            })));
            return;
        }
        let x = &self.vars[k];
        let mid = split_points(&lo, &hi)
            .find(|m| self.sign(&f.eval_var(x, m), prefix) != 0)
            .expect("finitely many roots");
        let v_lo = self.variations(seq, k, &lo, prefix);
        let v_mid = self.variations(seq, k, &mid, prefix);
        let left = v_lo - v_mid;
        self.isolate(f, seq, k, lo, mid.clone(), left, prefix, out);
        self.isolate(f, seq, k, mid, hi, count - left, prefix, out);
    }

    /// Strict bound on the absolute value of every real root.
    fn root_bound(&self, a: &Univ, prefix: &mut [Coord]) -> Rational {
        let lc = a.last().unwrap();
        let mut enc = self.enclosure(lc, prefix);
        while enc.abs_lower().is_zero() {
            let top = self
                .top_index(lc, prefix.len())
                .expect("nonzero leading coefficient");
            self.refine_all(lc, prefix, top);
            enc = self.enclosure(lc, prefix);
        }
        let low = enc.abs_lower();
        let m = a[..a.len() - 1]
            .iter()
            .map(|c| self.enclosure(c, prefix).abs_upper() / &low)
            .max()
            .unwrap_or_else(Rational::zero);
        // integer bound keeps the bisection points simple
        let b = m.ceil() + Rational::one();
        b.max(Rational::one())
    }

    /// Orders two coordinates at position `k` over the same prefix, refining as needed.
    pub fn cmp(&self, a: &mut Coord, b: &mut Coord, k: usize, prefix: &mut [Coord]) -> Ordering {
        let mut checked_common = false;
        loop {
            let ((alo, alo_in), (ahi, ahi_in)) = a.bounds();
            let ((blo, blo_in), (bhi, bhi_in)) = b.bounds();
            if ahi < blo || (ahi == blo && !(ahi_in && blo_in)) {
                return Ordering::Less;
            }
            if bhi < alo || (bhi == alo && !(bhi_in && alo_in)) {
                return Ordering::Greater;
            }
            if let (Coord::Rat(p), Coord::Rat(q)) = (&*a, &*b) {
                return p.cmp(q);
            }
            if !checked_common {
                checked_common = true;
                if self.same_root(a, b, k, prefix) {
                    return Ordering::Equal;
                }
            }
            self.refine_coord(a, k, prefix);
            self.refine_coord(b, k, prefix);
        }
    }

    fn refine_coord(&self, c: &mut Coord, k: usize, prefix: &mut [Coord]) {
        if let Coord::Root(_) = c {
            let mut tmp: Vec<Coord> = prefix.to_vec();
            tmp.push(c.clone());
            self.refine(&mut tmp, k);
            *c = tmp.pop().unwrap();
            prefix.clone_from_slice(&tmp);
        }
    }

    /// Whether two overlapping coordinates denote the same number.
    fn same_root(&self, a: &Coord, b: &Coord, k: usize, prefix: &mut [Coord]) -> bool {
        let x = &self.vars[k];
        match (a, b) {
            (Coord::Rat(q), Coord::Root(r)) | (Coord::Root(r), Coord::Rat(q)) => {
                let at = self.subst_rational(&r.poly.eval_var(x, q), prefix);
                r.lo < *q && *q < r.hi && self.sign(&at, prefix) == 0
            }
            (Coord::Root(r), Coord::Root(s)) => {
                let lo = (&r.lo).max(&s.lo).clone();
                let hi = (&r.hi).min(&s.hi).clone();
                if lo >= hi {
                    return false;
                }
                let fa = self.strip(self.subst_rational(&r.poly, prefix).coeffs_in(x), prefix);
                let fb = self.strip(self.subst_rational(&s.poly, prefix).coeffs_in(x), prefix);
                let g = self.gcd(fa, fb, prefix);
                if g.len() <= 1 {
                    return false;
                }
                // endpoints of isolating intervals are never roots, so g(lo), g(hi) != 0
                let seq: Vec<Poly> = self
                    .sturm_univ(&g, prefix)
                    .iter()
                    .map(|c| Poly::from_coeffs(x, c))
                    .collect();
                self.variations(&seq, k, &lo, prefix) > self.variations(&seq, k, &hi, prefix)
            }
            _ => false,
        }
    }
}

/// Removes a common positive rational factor from a univariate over polynomials.
fn normalize_univ(a: Univ) -> Univ {
    let mut den = num_bigint::BigInt::one();
    let mut num = num_bigint::BigInt::zero();
    for c in &a {
        for (_, q) in c.terms() {
            den = den.lcm(q.denom());
            num = num.gcd(q.numer());
        }
    }
    if num.is_zero() {
        return a;
    }
    let f = Rational::new(den, num);
    a.iter().map(|c| c.scale(&f)).collect()
}

/// Interior points of `(lo, hi)`, the midpoint first, then points drifting off it.
fn split_points(lo: &Rational, hi: &Rational) -> impl Iterator<Item = Rational> {
    let mid = (lo + hi) / rat(2);
    let w = hi - lo;
    let offsets = (2u32..).flat_map(move |j| {
        let d = &w / Rational::from_integer(num_bigint::BigInt::from(1) << j);
        [d.clone(), -d]
    });
    std::iter::once(Rational::zero())
        .chain(offsets)
        .map(move |d| &mid + &d)
}

pub(crate) fn sign_rat(q: &Rational) -> i32 {
    crate::poly::univariate::sign(q)
}
