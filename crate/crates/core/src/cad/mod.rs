//! Sign-invariant cylindrical algebraic decomposition and the Euler
//! characteristic with compact supports of basic semialgebraic sets.

mod algebraic;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

pub use algebraic::{Coord, Field, Interval, RootCoord};

use crate::formula::BasicFormula;
use crate::poly::{principal_subresultants, rat, Poly, Rational, UPoly, Var};

pub const DEFAULT_CAP: usize = 3;
pub const MAX_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CadError {
    #[error("{nvars} variables exceed the decomposition cap {cap}")]
    CapExceeded { nvars: usize, cap: usize },
    #[error("the zero polynomial cannot be decomposed")]
    ZeroPolynomial,
    #[error("variable `{0}` is not in the variable order")]
    UnknownVariable(String),
    #[error("variable order {given:?} is not a permutation of {expected:?}")]
    BadOrder {
        given: Vec<String>,
        expected: Vec<String>,
    },
    #[error("point location failed: {0}")]
    Location(String),
}

#[derive(Debug, Clone)]
pub struct CadOptions {
    pub cap: usize,
    pub order: Option<Vec<Var>>,
}

impl Default for CadOptions {
    fn default() -> Self {
        CadOptions {
            cap: DEFAULT_CAP,
            order: None,
        }
    }
}

/// A leaf cell of the decomposition.
#[derive(Debug, Clone)]
pub struct CadCell {
    /// Position in each stack: even entries are sectors, odd ones sections.
    pub index: Vec<usize>,
    pub dim: usize,
    pub sample: Vec<Coord>,
    pub signs: Vec<i32>,
}

impl fmt::Display for CadCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sample: Vec<String> = self.sample.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "cell {:?} dim {} signs {:?} at ({})",
            self.index,
            self.dim,
            self.signs,
            sample.join(", ")
        )
    }
}

struct Node {
    sample: Vec<Coord>,
    dim: usize,
    children: Vec<Node>,
}

pub struct Cad {
    vars: Vec<Var>,
    inputs: Vec<Poly>,
    /// `levels[k]`: projection factors whose highest variable is `vars[k]`.
    levels: Vec<Vec<Poly>>,
    root: Node,
}

fn reducta(f: &Poly, x: &Var) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut g = f.clone();
    loop {
        let d = g.degree_in(x);
        if d == 0 {
            break;
        }
        let lc = g.coeffs_in(x).pop().unwrap();
        out.push(g.clone());
        if lc.is_constant() {
            break;
        }
        g = &g - &lc.mul_monomial(&crate::poly::Monomial::var(x.clone(), d));
    }
    out
}

/// Collins–Hong projection of the polynomials whose main variable is `x`.
fn project(a: &[Poly], x: &Var) -> Vec<Poly> {
    let mut out = Vec::new();
    for (i, f) in a.iter().enumerate() {
        let red = reducta(f, x);
        for g in &red {
            out.push(g.coeffs_in(x).pop().unwrap());
            if g.degree_in(x) >= 2 {
                out.extend(principal_subresultants(g, &g.derivative(x), x).unwrap());
            }
        }
        for h in &a[i + 1..] {
            for g in &red {
                out.extend(principal_subresultants(g, h, x).unwrap());
            }
        }
    }
    out
}

fn top_level(p: &Poly, vars: &[Var]) -> Option<usize> {
    (0..vars.len()).rev().find(|&i| p.contains_var(&vars[i]))
}

impl Cad {
    /// Decomposes `R^n` (variables in `vars`, projected last-first) sign-invariantly for `polys`.
    pub fn new(polys: &[Poly], vars: &[Var], cap: usize) -> Result<Cad, CadError> {
        if vars.len() > cap {
            return Err(CadError::CapExceeded {
                nvars: vars.len(),
                cap,
            });
        }
        let known: BTreeSet<&Var> = vars.iter().collect();
        for p in polys {
            if p.is_zero() {
                return Err(CadError::ZeroPolynomial);
            }
            if let Some(v) = p.vars().iter().find(|v| !known.contains(v)) {
                return Err(CadError::UnknownVariable(v.to_string()));
            }
        }
        let n = vars.len();
        let mut levels: Vec<BTreeSet<Poly>> = vec![BTreeSet::new(); n];
        let add = |levels: &mut Vec<BTreeSet<Poly>>, p: &Poly| {
            if let Some(k) = top_level(p, vars) {
                levels[k].insert(p.primitive());
            }
        };
        for p in polys {
            add(&mut levels, p);
        }
        for k in (1..n).rev() {
            let a: Vec<Poly> = levels[k].iter().cloned().collect();
            for p in project(&a, &vars[k]) {
                if !p.is_zero() {
                    add(&mut levels, &p);
                }
            }
        }
        let mut cad = Cad {
            vars: vars.to_vec(),
            inputs: polys.to_vec(),
            levels: levels
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            root: Node {
                sample: Vec::new(),
                dim: 0,
                children: Vec::new(),
            },
        };
        let mut root = Node {
            sample: Vec::new(),
            dim: 0,
            children: Vec::new(),
        };
        cad.lift(&mut root);
        cad.root = root;
        Ok(cad)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn projection_factors(&self) -> &[Vec<Poly>] {
        &self.levels
    }

    fn lift(&self, node: &mut Node) {
        let k = node.sample.len();
        if k == self.vars.len() {
            return;
        }
        let field = Field { vars: &self.vars };
        let mut prefix = node.sample.clone();
        let mut roots: Vec<Coord> = Vec::new();
        for f in &self.levels[k] {
            let Some(rs) = field.roots(f, k, &mut prefix) else {
                continue;
            };
            for mut r in rs {
                let mut pos = roots.len();
                let mut dup = false;
                for (j, existing) in roots.iter_mut().enumerate() {
                    match field.cmp(&mut r, existing, k, &mut prefix) {
                        Ordering::Less => {
                            pos = j;
                            break;
                        }
                        Ordering::Equal => {
                            dup = true;
                            break;
                        }
                        Ordering::Greater => {}
                    }
                }
                if !dup {
                    roots.insert(pos, r);
                }
            }
        }
        let mut samples: Vec<(Coord, usize)> = Vec::new();
        if roots.is_empty() {
            samples.push((Coord::Rat(Rational::zero()), 1));
        } else {
            let first = lower(&roots[0]) - Rational::one();
            samples.push((Coord::Rat(first.floor()), 1));
            for j in 0..roots.len() {
                if j > 0 {
                    let x = self.between(&mut roots, j - 1, k, &mut prefix);
                    samples.push((Coord::Rat(x), 1));
                }
                samples.push((roots[j].clone(), 0));
            }
            let last = upper(roots.last().unwrap()) + Rational::one();
            samples.push((Coord::Rat(last.ceil()), 1));
        }
        node.sample = prefix.clone();
        for (c, extra) in samples {
            let mut s = prefix.clone();
            s.push(c);
            let mut child = Node {
                sample: s,
                dim: node.dim + extra,
                children: Vec::new(),
            };
            self.lift(&mut child);
            node.children.push(child);
        }
    }

    /// A rational strictly between `roots[j]` and `roots[j + 1]`.
    fn between(&self, roots: &mut [Coord], j: usize, k: usize, prefix: &mut [Coord]) -> Rational {
        let field = Field { vars: &self.vars };
        loop {
            let (a, a_exact) = match &roots[j] {
                Coord::Rat(q) => (q.clone(), true),
                Coord::Root(r) => (r.hi.clone(), false),
            };
            let (b, b_exact) = match &roots[j + 1] {
                Coord::Rat(q) => (q.clone(), true),
                Coord::Root(r) => (r.lo.clone(), false),
            };
            if a < b || (a == b && !a_exact && !b_exact) {
                return simple_between(&a, &b);
            }
            for idx in [j, j + 1] {
                if let Coord::Root(_) = roots[idx] {
                    let mut tmp = prefix.to_vec();
                    tmp.push(roots[idx].clone());
                    field.refine(&mut tmp, k);
                    roots[idx] = tmp.pop().unwrap();
                    prefix.clone_from_slice(&tmp);
                }
            }
        }
    }

    /// Leaf cells in depth-first order, with the signs of the input polynomials.
    pub fn cells(&self) -> Vec<CadCell> {
        let mut out = Vec::new();
        let mut index = Vec::new();
        self.collect(&self.root, &mut index, &mut out);
        out
    }

    fn collect(&self, node: &Node, index: &mut Vec<usize>, out: &mut Vec<CadCell>) {
        if node.sample.len() == self.vars.len() {
            let field = Field { vars: &self.vars };
            let mut pt = node.sample.clone();
            let signs = self.inputs.iter().map(|p| field.sign(p, &mut pt)).collect();
            out.push(CadCell {
                index: index.clone(),
                dim: node.dim,
                sample: pt,
                signs,
            });
            return;
        }
        for (i, c) in node.children.iter().enumerate() {
            index.push(i);
            self.collect(c, index, out);
            index.pop();
        }
    }

    /// The leaf cell containing a rational point.
    pub fn locate(&self, point: &[Rational]) -> Result<Vec<usize>, CadError> {
        let mut node = &self.root;
        let mut index = Vec::new();
        for (k, x) in point.iter().enumerate() {
            let bound: BTreeMap<Var, Rational> = self.vars[..k]
                .iter()
                .cloned()
                .zip(point[..k].iter().cloned())
                .collect();
            let mut product = UPoly::from_ints(&[1]);
            for f in &self.levels[k] {
                let g = f.substitute_all(
                    &bound
                        .iter()
                        .map(|(v, q)| (v.clone(), Poly::constant(q.clone())))
                        .collect(),
                );
                let u = UPoly::from_poly(&g, &self.vars[k])
                    .map_err(|e| CadError::Location(e.to_string()))?;
                if !u.is_zero() {
                    product = mul_upoly(&product, &u);
                }
            }
            let roots = product
                .isolate_roots()
                .map_err(|e| CadError::Location(e.to_string()))?;
            let sections = node.children.len() / 2;
            if roots.len() != sections {
                return Err(CadError::Location(format!(
                    "stack over {index:?} has {sections} sections but the point sees {}",
                    roots.len()
                )));
            }
            let below = roots
                .iter()
                .filter(|r| product.cmp_root(r, x) == Ordering::Less)
                .count();
            let on = roots
                .iter()
                .any(|r| product.cmp_root(r, x) == Ordering::Equal);
            let i = if on { 2 * below + 1 } else { 2 * below };
            index.push(i);
            node = &node.children[i];
        }
        Ok(index)
    }
}

fn lower(c: &Coord) -> Rational {
    match c {
        Coord::Rat(q) => q.clone(),
        Coord::Root(r) => r.lo.clone(),
    }
}

fn upper(c: &Coord) -> Rational {
    match c {
        Coord::Rat(q) => q.clone(),
        Coord::Root(r) => r.hi.clone(),
    }
}

/// Prefers an integer, then a midpoint.
fn simple_between(a: &Rational, b: &Rational) -> Rational {
    let f = a.floor() + Rational::one();
    if &f < b && &f > a {
        return f;
    }
    if a == b {
        return a.clone();
    }
    (a + b) / rat(2)
}

fn mul_upoly(a: &UPoly, b: &UPoly) -> UPoly {
    let mut c = vec![Rational::zero(); a.coeffs().len() + b.coeffs().len() - 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    UPoly::new(c)
}

/// Sign-invariant cells for `polys` in `vars` order.
pub fn cad_decompose(polys: &[Poly], vars: &[Var], cap: usize) -> Result<Vec<CadCell>, CadError> {
    Ok(Cad::new(polys, vars, cap)?.cells())
}

fn order_for(f: &BasicFormula, opts: &CadOptions) -> Result<Vec<Var>, CadError> {
    match &opts.order {
        None => Ok(f.vars().to_vec()),
        Some(o) => {
            let a: BTreeSet<&Var> = o.iter().collect();
            let b: BTreeSet<&Var> = f.vars().iter().collect();
            if a != b || o.len() != f.nvars() {
                return Err(CadError::BadOrder {
                    given: o.iter().map(|v| v.to_string()).collect(),
                    expected: f.vars().iter().map(|v| v.to_string()).collect(),
                });
            }
            Ok(o.clone())
        }
    }
}

fn satisfied(f: &BasicFormula, sign_of: &mut dyn FnMut(&Poly) -> i32) -> bool {
    f.eqs().iter().all(|p| sign_of(p) == 0)
        && f.neqs().iter().all(|p| sign_of(p) != 0)
        && f.pos().iter().all(|p| sign_of(p) > 0)
        && f.geqs().iter().all(|p| sign_of(p) >= 0)
}

/// `χ_c` of the real points of `f`.
pub fn euler_compact_with(f: &BasicFormula, opts: &CadOptions) -> Result<i64, CadError> {
    let vars = order_for(f, opts)?;
    if vars.len() > opts.cap {
        return Err(CadError::CapExceeded {
            nvars: vars.len(),
            cap: opts.cap,
        });
    }
    let mut constant_sign = |p: &Poly| algebraic::sign_rat(&p.constant_term());
    let constants = BasicFormula::from_parts(
        Vec::new(),
        f.eqs().iter().filter(|p| p.is_constant()).cloned(),
        f.neqs().iter().filter(|p| p.is_constant()).cloned(),
        f.pos().iter().filter(|p| p.is_constant()).cloned(),
    );
    let geq_ok = f
        .geqs()
        .iter()
        .filter(|p| p.is_constant())
        .all(|p| constant_sign(p) >= 0);
    if !geq_ok || !satisfied(&constants, &mut constant_sign) {
        return Ok(0);
    }
    let polys: Vec<Poly> = f.polys().filter(|p| !p.is_constant()).cloned().collect();
    let cad = Cad::new(&polys, &vars, opts.cap)?;
    let mut chi = 0i64;
    for cell in cad.cells() {
        let signs: BTreeMap<&Poly, i32> = polys.iter().zip(cell.signs.iter().copied()).collect();
        let mut lookup = |p: &Poly| {
            if p.is_constant() {
                algebraic::sign_rat(&p.constant_term())
            } else {
                signs[p]
            }
        };
        if satisfied(f, &mut lookup) {
            chi += if cell.dim % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(chi)
}

pub fn euler_compact(f: &BasicFormula) -> Result<i64, CadError> {
    euler_compact_with(f, &CadOptions::default())
}

/// Real points of an equation system, when that set is finite.
pub fn count_points(eqs: &[Poly], vars: &[Var], cap: usize) -> Result<Option<usize>, CadError> {
    let cad = Cad::new(eqs, vars, cap)?;
    let mut count = 0;
    for cell in cad.cells() {
        if cell.signs.iter().all(|s| *s == 0) {
            if cell.dim > 0 {
                return Ok(None);
            }
            count += 1;
        }
    }
    Ok(Some(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> BasicFormula {
        parse_formula(s).unwrap()
    }

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }

    #[test]
    fn line_has_three_cells() {
        let cells = cad_decompose(&[Poly::var("x")], &vars(&["x"]), 3).unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(
            cells.iter().map(|c| c.dim).collect::<Vec<_>>(),
            vec![1, 0, 1]
        );
    }

    #[test]
    fn circle_has_thirteen_cells() {
        let p = Poly::var("x").pow(2) + Poly::var("y").pow(2) - Poly::one();
        assert_eq!(
            cad_decompose(&[p], &vars(&["x", "y"]), 3).unwrap().len(),
            13
        );
    }

    #[test]
    fn empty_input_is_one_cell() {
        let cells = cad_decompose(&[], &vars(&["x", "y"]), 3).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].dim, 2);
    }

    #[test]
    fn cap_and_zero_rejected() {
        assert!(matches!(
            cad_decompose(&[], &vars(&["a", "b", "c", "d"]), 3),
            Err(CadError::CapExceeded { .. })
        ));
        assert_eq!(
            cad_decompose(&[Poly::zero()], &vars(&["x"]), 3).unwrap_err(),
            CadError::ZeroPolynomial
        );
    }

    #[test]
    fn simple_euler_values() {
        assert_eq!(euler_compact(&f("vars x; x > 0")).unwrap(), -1);
        assert_eq!(euler_compact(&f("vars x, y; x^2 + y^2 = 1")).unwrap(), 0);
        assert_eq!(euler_compact(&f("vars x, y; x^2 + y^2 < 1")).unwrap(), 1);
        assert_eq!(euler_compact(&f("vars x, y; x*y = 1")).unwrap(), -2);
        assert_eq!(euler_compact(&f("vars x; 1 = 0")).unwrap(), 0);
        assert_eq!(euler_compact(&f("vars x; 0 = 0")).unwrap(), -1);
    }

    #[test]
    fn disc_slices() {
        assert_eq!(
            euler_compact(&f("vars x, y; x*y = 1/4, 1 - x^2 - y^2 > 0")).unwrap(),
            -2
        );
        assert_eq!(
            euler_compact(&f("vars x, y; x*y = 1/4, 1 - x^2 - y^2 >= 0")).unwrap(),
            2
        );
    }

    #[test]
    fn algebraic_sections_stack() {
        // sphere: sections over sections with irrational coordinates
        let s = f("vars x, y, z; 2*x^2 + 3*y^2 + z^2 = 2");
        assert_eq!(euler_compact(&s).unwrap(), 2);
        let h = f("vars x, y, z; x^2 + y^2 - z^2 = 2");
        assert_eq!(euler_compact(&h).unwrap(), 0);
    }

    #[test]
    fn towers_of_square_roots() {
        assert_eq!(
            euler_compact(&f("vars x, y; x^2 = 2, y^2 = 2, x*y = 2")).unwrap(),
            2
        );
        assert_eq!(euler_compact(&f("vars x, y; x^2 = 2, y^2 = x")).unwrap(), 2);
        assert_eq!(
            euler_compact(&f("vars x, y, z; x^2 = 2, y^2 = x, z^2 = y")).unwrap(),
            2
        );
        assert_eq!(
            euler_compact(&f("vars x, y; x^2 = 2, y^2 = 2, x*y - 2 > 0")).unwrap(),
            0
        );
        assert_eq!(
            euler_compact(&f("vars x, y; x^2 = 2, y^2 = 2, x*y - 2 < 0")).unwrap(),
            2
        );
    }

    #[test]
    fn point_location_matches_signs() {
        let p = Poly::var("x").pow(2) + Poly::var("y").pow(2) - Poly::int(2);
        let q = Poly::var("x") - Poly::var("y");
        let cad = Cad::new(&[p.clone(), q.clone()], &vars(&["x", "y"]), 3).unwrap();
        let cells = cad.cells();
        for (a, b) in [(0, 0), (1, 1), (-1, -1), (3, 1), (1, 0), (2, -5)] {
            let pt = [rat(a), rat(b)];
            let idx = cad.locate(&pt).unwrap();
            let cell = cells.iter().find(|c| c.index == idx).unwrap();
            let env: BTreeMap<Var, Rational> = vars(&["x", "y"]).into_iter().zip(pt).collect();
            let direct: Vec<i32> = [&p, &q]
                .iter()
                .map(|r| algebraic::sign_rat(&r.eval(&env).unwrap()))
                .collect();
            assert_eq!(cell.signs, direct, "point ({a}, {b})");
        }
    }
}
