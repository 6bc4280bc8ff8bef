use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::quadric;
use super::table::{canonical_key, ClassTable};
use super::VirtualPoly;
use crate::cad::{count_points, DEFAULT_CAP};
use crate::poly::{rational_sqrt, Monomial, Poly, Rational, UPoly, Var};

const MAX_DEPTH: usize = 40;

/// No rule determines the class of this system.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no catalog rule applies to [{}]", .0.iter().map(|p| format!("{p} = 0")).collect::<Vec<_>>().join(", "))]
pub struct Unsupported(pub Vec<Poly>);

/// Evaluates the virtual Poincaré polynomial of real algebraic sets by
/// elimination, quadric normal forms, a lookup table and finite point counts.
pub struct Evaluator<'t> {
    table: Option<&'t ClassTable>,
    cad_cap: Option<usize>,
    memo: RefCell<HashMap<Vec<Poly>, Result<VirtualPoly, Unsupported>>>,
}

impl Default for Evaluator<'_> {
    fn default() -> Self {
        Evaluator::new(None, Some(DEFAULT_CAP))
    }
}

impl<'t> Evaluator<'t> {
    /// `cad_cap: None` disables the point-count fallback.
    pub fn new(table: Option<&'t ClassTable>, cad_cap: Option<usize>) -> Self {
        Evaluator {
            table,
            cad_cap,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Rules only: no table, no point counting.
    pub fn bare() -> Self {
        Evaluator::new(None, None)
    }

    /// `beta({eqs = 0})` inside the affine space on `ambient`.
    pub fn eval_in(
        &self,
        ambient: &BTreeSet<Var>,
        eqs: &[Poly],
    ) -> Result<VirtualPoly, Unsupported> {
        self.eval_at(ambient, eqs.to_vec(), 0)
    }

    fn eval_at(
        &self,
        ambient: &BTreeSet<Var>,
        eqs: Vec<Poly>,
        depth: usize,
    ) -> Result<VirtualPoly, Unsupported> {
        let Some(eqs) = normalize(eqs) else {
            return Ok(VirtualPoly::zero());
        };
        let used: BTreeSet<Var> = eqs.iter().flat_map(|p| p.vars()).collect();
        let free = ambient.difference(&used).count() as i64;
        if eqs.is_empty() {
            return Ok(VirtualPoly::u_pow(free));
        }
        Ok(self.eval_sys(eqs, depth)?.shift(free))
    }

    fn eval_sys(&self, eqs: Vec<Poly>, depth: usize) -> Result<VirtualPoly, Unsupported> {
        let comps = components(&eqs);
        if comps.len() > 1 {
            let mut acc = VirtualPoly::one();
            for c in comps {
                acc = &acc * &self.eval_sys(c, depth)?;
                if acc.is_zero() {
                    break;
                }
            }
            return Ok(acc);
        }
        if let Some(hit) = self.memo.borrow().get(&eqs) {
            return hit.clone();
        }
        let out = if depth > MAX_DEPTH {
            Err(Unsupported(eqs.clone()))
        } else {
            self.rules(&eqs, depth + 1)
        };
        self.memo.borrow_mut().insert(eqs, out.clone());
        out
    }

    fn rules(&self, eqs: &[Poly], depth: usize) -> Result<VirtualPoly, Unsupported> {
        let ambient: BTreeSet<Var> = eqs.iter().flat_map(|p| p.vars()).collect();
        if eqs.iter().any(definite) {
            return Ok(VirtualPoly::zero());
        }
        for (k, e) in eqs.iter().enumerate() {
            if let Some(zeros) = forced_zeros(e) {
                let sys = with(&without(eqs, k), zeros.into_iter().map(Poly::var));
                return self.eval_at(&ambient, sys, depth);
            }
        }
        for (k, e) in eqs.iter().enumerate() {
            let vs = e.vars();
            if vs.len() != 1 {
                continue;
            }
            let v = vs.into_iter().next().unwrap();
            let u = UPoly::from_poly(e, &v).expect("univariate");
            if u.count_real_roots() == 0 {
                return Ok(VirtualPoly::zero());
            }
            if ambient.len() == 1 {
                let g = eqs.iter().fold(UPoly::default(), |g, p| {
                    g.gcd(&UPoly::from_poly(p, &v).expect("univariate"))
                });
                return Ok(VirtualPoly::int(g.count_real_roots() as i64));
            }
            if let Some((roots, rest)) = rational_roots(&u) {
                let others: Vec<Poly> = without(eqs, k);
                let smaller: BTreeSet<Var> = ambient.iter().filter(|w| **w != v).cloned().collect();
                let mut acc = VirtualPoly::zero();
                for r in roots {
                    let sub: Vec<Poly> = others.iter().map(|p| p.eval_var(&v, &r)).collect();
                    acc = &acc + &self.eval_at(&smaller, sub, depth)?;
                }
                if rest.count_real_roots() > 0 {
                    let mut sys = others.clone();
                    sys.push(rest.to_poly(&v));
                    acc = &acc + &self.eval_at(&ambient, sys, depth)?;
                }
                return Ok(acc);
            }
        }
        if let Some((k, v)) = constant_linear(eqs) {
            let e = &eqs[k];
            let c = e.coeffs_in(&v);
            let value = c[0].scale(&(-Rational::one() / c[1].constant_value().unwrap()));
            let sub: Vec<Poly> = without(eqs, k)
                .iter()
                .map(|p| p.substitute(&v, &value))
                .collect();
            let smaller: BTreeSet<Var> = ambient.iter().filter(|w| **w != v).cloned().collect();
            return self.eval_at(&smaller, sub, depth);
        }
        for (k, e) in eqs.iter().enumerate() {
            if let Some((x, g)) = monomial_factor(e) {
                // {x g = 0} = {x = 0} + {g = 0} - {x = 0, g = 0}
                let others = without(eqs, k);
                let xp = Poly::var(x);
                let a = self.eval_at(&ambient, with(&others, [xp.clone()]), depth)?;
                let b = self.eval_at(&ambient, with(&others, [g.clone()]), depth)?;
                let ab = self.eval_at(&ambient, with(&others, [xp, g]), depth)?;
                return Ok(&(&a + &b) - &ab);
            }
        }
        if eqs.len() == 1 {
            if let Some(shape) = quadric::classify(&eqs[0]) {
                return Ok(shape.class());
            }
        }
        if let Some(t) = self.table {
            if let Some(v) = t.lookup(&canonical_key(eqs)) {
                return Ok(v.clone());
            }
        }
        if let Some((k, d)) = reduce_pair(eqs) {
            let mut sys = eqs.to_vec();
            sys[k] = d;
            return self.eval_at(&ambient, sys, depth);
        }
        for (k, e) in eqs.iter().enumerate() {
            match binary_form(e) {
                Some(BinaryForm::Definite(s, t)) => {
                    let sys = with(&without(eqs, k), [Poly::var(s), Poly::var(t)]);
                    return self.eval_at(&ambient, sys, depth);
                }
                Some(BinaryForm::Split(l1, l2)) => {
                    let others = without(eqs, k);
                    let a = self.eval_at(&ambient, with(&others, [l1.clone()]), depth)?;
                    let b = self.eval_at(&ambient, with(&others, [l2.clone()]), depth)?;
                    let ab = self.eval_at(&ambient, with(&others, [l1, l2]), depth)?;
                    return Ok(&(&a + &b) - &ab);
                }
                None => {}
            }
        }
        if let Some((k, v)) = polynomial_linear(eqs) {
            return self.linear_split(eqs, k, &v, &ambient, depth);
        }
        if let Some(cap) = self.cad_cap.filter(|_| eqs.len() >= ambient.len()) {
            let vars: Vec<Var> = ambient.iter().cloned().collect();
            if let Ok(Some(n)) = count_points(eqs, &vars, cap) {
                return Ok(VirtualPoly::int(n as i64));
            }
        }
        Err(Unsupported(eqs.to_vec()))
    }

    /// `E = c v + g`: split on `c != 0`, where `v = -g / c` is a graph.
    fn linear_split(
        &self,
        eqs: &[Poly],
        k: usize,
        v: &Var,
        ambient: &BTreeSet<Var>,
        depth: usize,
    ) -> Result<VirtualPoly, Unsupported> {
        let cs = eqs[k].coeffs_in(v);
        let (g, c) = (&cs[0], &cs[1]);
        let others = without(eqs, k);
        let smaller: BTreeSet<Var> = ambient.iter().filter(|w| *w != v).cloned().collect();
        let cleared: Vec<Poly> = others.iter().map(|p| clear_linear(p, v, c, g)).collect();
        let all = self.eval_at(&smaller, cleared.clone(), depth)?;
        let on_c = self.eval_at(&smaller, with(&cleared, [c.clone()]), depth)?;
        let degenerate = self.eval_at(ambient, with(&others, [c.clone(), g.clone()]), depth)?;
        Ok(&(&all - &on_c) + &degenerate)
    }
}

/// `c^d p(-g / c)` as a polynomial, `d = deg_v p`.
fn clear_linear(p: &Poly, v: &Var, c: &Poly, g: &Poly) -> Poly {
    let cs = p.coeffs_in(v);
    let d = cs.len().saturating_sub(1) as u32;
    let neg_g = -g;
    cs.iter().enumerate().fold(Poly::zero(), |acc, (i, a)| {
        &acc + &(&(a * &neg_g.pow(i as u32)) * &c.pow(d - i as u32))
    })
}

fn normalize(eqs: Vec<Poly>) -> Option<Vec<Poly>> {
    let mut out = Vec::new();
    for p in eqs {
        if p.is_zero() {
            continue;
        }
        if p.is_constant() {
            return None;
        }
        out.push(p.primitive());
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn without(eqs: &[Poly], k: usize) -> Vec<Poly> {
    eqs.iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, p)| p.clone())
        .collect()
}

fn with(eqs: &[Poly], extra: impl IntoIterator<Item = Poly>) -> Vec<Poly> {
    eqs.iter().cloned().chain(extra).collect()
}

/// Splits a system into blocks with disjoint variables.
fn components(eqs: &[Poly]) -> Vec<Vec<Poly>> {
    let mut blocks: Vec<(BTreeSet<Var>, Vec<Poly>)> = Vec::new();
    for p in eqs {
        let mut vs = p.vars();
        let mut ps = vec![p.clone()];
        let mut keep = Vec::new();
        for (bv, bp) in blocks.drain(..) {
            if bv.is_disjoint(&vs) {
                keep.push((bv, bp));
            } else {
                vs.extend(bv);
                ps.extend(bp);
            }
        }
        keep.push((vs, ps));
        blocks = keep;
    }
    blocks
        .into_iter()
        .map(|(_, mut ps)| {
            ps.sort();
            ps
        })
        .collect()
}

/// Every term is an even monomial with the same strict sign, constant included.
fn definite(p: &Poly) -> bool {
    let c = p.constant_term();
    !c.is_zero()
        && p.terms().all(|(m, k)| {
            k.is_positive() == c.is_positive() && m.pairs().iter().all(|(_, e)| e % 2 == 0)
        })
}

/// `sum c_i v_i^(2 e_i) = 0` with all `c_i` of one sign: every `v_i` vanishes.
fn forced_zeros(p: &Poly) -> Option<Vec<Var>> {
    if !p.constant_term().is_zero() || p.terms().count() < 2 {
        return None;
    }
    let positive = p.leading_coeff().is_positive();
    let mut vs = Vec::new();
    for (m, k) in p.terms() {
        match m.pairs() {
            [(v, e)] if e % 2 == 0 && k.is_positive() == positive => vs.push(v.clone()),
            _ => return None,
        }
    }
    Some(vs)
}

fn constant_linear(eqs: &[Poly]) -> Option<(usize, Var)> {
    let mut best: Option<(usize, Var, usize)> = None;
    for (k, e) in eqs.iter().enumerate() {
        for v in e.vars() {
            if e.degree_in(&v) != 1 || !e.coeffs_in(&v)[1].is_constant() {
                continue;
            }
            let cost = eqs.iter().filter(|p| p.contains_var(&v)).count();
            if best.as_ref().is_none_or(|b| cost < b.2) {
                best = Some((k, v, cost));
            }
        }
    }
    best.map(|(k, v, _)| (k, v))
}

fn polynomial_linear(eqs: &[Poly]) -> Option<(usize, Var)> {
    let mut best: Option<(usize, Var, (usize, u32))> = None;
    for (k, e) in eqs.iter().enumerate() {
        for v in e.vars() {
            if e.degree_in(&v) != 1 {
                continue;
            }
            let cost = (
                eqs.iter().filter(|p| p.contains_var(&v)).count(),
                e.coeffs_in(&v)[1].total_degree(),
            );
            if best.as_ref().is_none_or(|b| cost < b.2) {
                best = Some((k, v, cost));
            }
        }
    }
    best.map(|(k, v, _)| (k, v))
}

/// `x * g` for a variable `x` dividing every term.
fn monomial_factor(p: &Poly) -> Option<(Var, Poly)> {
    let x = p
        .vars()
        .into_iter()
        .find(|v| p.terms().all(|(m, _)| m.degree_in(v) > 0))?;
    let g = p.div_exact(&Poly::var(x.clone()))?;
    Some((x, g))
}

/// `p - λ q` for another equation `q` when that has fewer terms than `p`.
fn reduce_pair(eqs: &[Poly]) -> Option<(usize, Poly)> {
    for (i, p) in eqs.iter().enumerate() {
        for (j, q) in eqs.iter().enumerate() {
            if i == j {
                continue;
            }
            for (m, cq) in q.terms() {
                let cp = p.coeff(m);
                if cp.is_zero() {
                    continue;
                }
                let d = p - &q.scale(&(&cp / cq));
                if d.num_terms() < p.num_terms() {
                    return Some((i, d));
                }
            }
        }
    }
    None
}

enum BinaryForm {
    /// No real zero besides `s = t = 0`.
    Definite(Var, Var),
    /// Product of two rational linear forms.
    Split(Poly, Poly),
}

/// `a s^2 + b s t + c t^2` with `a != 0`.
fn binary_form(p: &Poly) -> Option<BinaryForm> {
    if p.homogeneous_degree() != Some(2) {
        return None;
    }
    let vs: Vec<Var> = p.vars().into_iter().collect();
    let [s, t] = vs.as_slice() else { return None };
    let st = p.coeffs_in(s);
    if st.len() != 3 {
        return None;
    }
    let a = st[2].constant_value()?;
    let b = st[1].coeff(&Monomial::var(t.clone(), 1));
    let c = st[0].coeff(&Monomial::var(t.clone(), 2));
    let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
    if disc.is_negative() {
        return Some(BinaryForm::Definite(s.clone(), t.clone()));
    }
    let r = rational_sqrt(&disc)?;
    let two_a = Rational::from_integer(2.into()) * &a;
    let root = |r: &Rational| {
        let lam = (-&b + r) / &two_a;
        &Poly::var(s.clone()) - &Poly::var(t.clone()).scale(&lam)
    };
    Some(BinaryForm::Split(root(&r), root(&-&r)))
}

/// Rational roots of `u` and its cofactor, when any rational root exists.
fn rational_roots(u: &UPoly) -> Option<(Vec<Rational>, UPoly)> {
    let mut f = u.squarefree_part();
    let mut roots = Vec::new();
    if f.coeffs()[0].is_zero() {
        roots.push(Rational::zero());
        f = f.div_rem(&UPoly::from_ints(&[0, 1])).0;
    }
    let ints = integer_coeffs(&f);
    let a0 = ints.first()?.abs().to_u64()?;
    let an = ints.last()?.abs().to_u64()?;
    if a0 > 1 << 40 || an > 1 << 40 {
        return (!roots.is_empty()).then_some((roots, f));
    }
    for p in divisors(a0) {
        for q in divisors(an) {
            if p.gcd(&q) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(p) * s, BigInt::from(q));
                if f.degree().unwrap_or(0) > 0 && f.eval(&r).is_zero() {
                    f = f.div_rem(&UPoly::new(vec![-r.clone(), Rational::one()])).0;
                    roots.push(r);
                }
            }
        }
    }
    (!roots.is_empty()).then_some((roots, f))
}

fn integer_coeffs(f: &UPoly) -> Vec<BigInt> {
    let den = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |d, c| d.lcm(c.denom()));
    f.coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect()
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    fn beta(eqs: &[&str]) -> String {
        let ps: Vec<Poly> = eqs.iter().map(|s| parse_poly_free(s).unwrap()).collect();
        let amb: BTreeSet<Var> = ps.iter().flat_map(|p| p.vars()).collect();
        Evaluator::default().eval_in(&amb, &ps).unwrap().to_string()
    }

    #[test]
    fn elementary_sets() {
        assert_eq!(beta(&["x*y - 1"]), "u - 1");
        assert_eq!(beta(&["x*y"]), "2*u - 1");
        assert_eq!(beta(&["x*y*z - 1"]), "u^2 - 2*u + 1");
        assert_eq!(beta(&["x^3 - x"]), "3");
        assert_eq!(beta(&["x^2 - 2"]), "2");
        assert_eq!(beta(&["x^2 - 2", "x*y - 1"]), "2");
        assert_eq!(beta(&["y^4 + x^2 + 1"]), "0");
        assert_eq!(beta(&["x^2 + y^4", "x*z + y*w - 1"]), "0");
        assert_eq!(beta(&["x^2 + y^2", "z^2 + w^2 - 1"]), "u + 1");
    }

    #[test]
    fn circle_and_hyperbola_meet_in_four_points() {
        assert_eq!(beta(&["x*y - 1/4", "x^2 + y^2 - 1"]), "4");
    }

    #[test]
    fn additivity_across_a_factor() {
        // {x (x - 1) = 0} x R
        assert_eq!(beta(&["x^2 - x + 0*y"]), "2");
        assert_eq!(beta(&["x*y - x"]), "2*u - 1");
    }

    #[test]
    fn linear_split_with_polynomial_coefficient() {
        // x y = z: graph over {y != 0} plus the plane y = 0, z = 0
        assert_eq!(beta(&["x*y - z"]), "u^2");
        assert_eq!(beta(&["x*y^2 - 1"]), "u - 1");
    }

    #[test]
    fn shared_equation_is_reduced() {
        // two disjoint hyperbolas y = +-z, y^2 - x^2 = 1
        assert_eq!(beta(&["y^2 - x^2 - 1", "z^2 - x^2 - 1"]), "2*u - 2");
    }

    #[test]
    fn binary_forms() {
        // y = x or y = -x, meeting at the origin of the circle's centre line
        assert_eq!(beta(&["x^2 - y^2", "z - 1"]), "2*u - 1");
        assert_eq!(beta(&["x^2 + x*y + y^2", "z^2 - 1"]), "2");
    }
}
