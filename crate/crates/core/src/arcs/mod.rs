//! Truncated arcs at the origin and a direct computation of zeta coefficients.

use std::fmt;

use num_traits::{One, Zero};

use crate::cad::{euler_compact_with, CadOptions};
use crate::catalog::{beta_class, beta_formula, Evaluator, VirtualPoly};
use crate::formula::BasicFormula;
use crate::k0::{chi_closed_form, ClassExpr};
use crate::poly::{Monomial, Poly, Rational, Var};
use crate::zeta::{
    euler_of_class, series_expand, zeta_from_resolution, EpsilonSymbol, ResolutionData, ZetaError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArcError {
    #[error("f(0) is not 0")]
    NotAtOrigin,
    #[error("jet order must be at least 1")]
    ZeroOrder,
    #[error("variable `{0}` of f is not declared")]
    UnknownVariable(String),
    #[error("no exact or cell-level path for n = {n}: {why}")]
    Unsupported { n: usize, why: String },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// `X_(n,f)^eps` over the coefficients `a{i}_{j}` of `gamma_i(t) = sum_j a{i}_{j} t^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetFormula {
    pub f: Poly,
    pub n: usize,
    pub eps: EpsilonSymbol,
    pub formula: BasicFormula,
}

pub fn coefficient_var(i: usize, j: usize) -> Var {
    Var::new(&format!("a{i}_{j}"))
}

/// Coefficients of `t^0 .. t^n` in `f(gamma(t))`.
fn truncated_composition(f: &Poly, vars: &[Var], n: usize) -> Vec<Poly> {
    let t = Var::new("\u{1}t");
    let gamma: Vec<Poly> = (0..vars.len())
        .map(|i| {
            (1..=n).fold(Poly::zero(), |acc, j| {
                let m =
                    Monomial::from_pairs([(t.clone(), j as u32), (coefficient_var(i + 1, j), 1)]);
                &acc + &Poly::monomial(m, Rational::one())
            })
        })
        .collect();
    let truncate = |p: Poly| {
        Poly::from_terms(
            p.terms()
                .filter(|(m, _)| m.degree_in(&t) as usize <= n)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    };
    let mut out = Poly::zero();
    for (m, c) in f.terms() {
        let mut term = Poly::constant(c.clone());
        for (v, e) in m.pairs() {
            let i = vars.iter().position(|w| w == v).expect("checked");
            for _ in 0..*e {
                term = truncate(&term * &gamma[i]);
            }
        }
        out = &out + &term;
    }
    let mut cs = out.coeffs_in(&t);
    cs.resize(n + 1, Poly::zero());
    cs
}

pub fn jet_formula(
    f: &Poly,
    vars: &[Var],
    n: usize,
    eps: EpsilonSymbol,
) -> Result<JetFormula, ArcError> {
    if n == 0 {
        return Err(ArcError::ZeroOrder);
    }
    if let Some(v) = f.vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(ArcError::UnknownVariable(v.name().to_string()));
    }
    if !f.constant_term().is_zero() {
        return Err(ArcError::NotAtOrigin);
    }
    let cs = truncated_composition(f, vars, n);
    let coeff_vars: Vec<Var> = (1..=vars.len())
        .flat_map(|i| (1..=n).map(move |j| coefficient_var(i, j)))
        .collect();
    let mut formula = BasicFormula::new(coeff_vars);
    for c in &cs[1..n] {
        formula.add_eq(c.clone());
    }
    let formula = eps.constrain(formula, &cs[n]);
    Ok(JetFormula {
        f: f.clone(),
        n,
        eps,
        formula,
    })
}

/// A directly computed `[X_(n,f)^eps] L^(-nd)`, or only its `chi_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectCoefficient {
    Class(ClassExpr),
    Euler(i64),
}

impl fmt::Display for DirectCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectCoefficient::Class(c) => write!(f, "{c}"),
            DirectCoefficient::Euler(x) => write!(f, "chi_c = {x}"),
        }
    }
}

fn compositions(alphas: &[u32], n: usize) -> Vec<Vec<usize>> {
    match alphas {
        [] => {
            if n == 0 {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        [a, rest @ ..] => {
            let mut out = Vec::new();
            let mut k = 1;
            while k * (*a as usize) <= n {
                for mut tail in compositions(rest, n - k * *a as usize) {
                    tail.insert(0, k);
                    out.push(tail);
                }
                k += 1;
            }
            out
        }
    }
}

/// Exact class for `f = c x^alpha`: stratify by the orders of the `gamma_i`.
pub fn monomial_coefficient(
    f: &Poly,
    vars: &[Var],
    n: usize,
    eps: EpsilonSymbol,
) -> Option<ClassExpr> {
    if f.num_terms() != 1 || f.is_constant() {
        return None;
    }
    let (m, c) = f.terms().next()?;
    let d = vars.len();
    let used: Vec<(usize, u32)> = vars
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let e = m.degree_in(v);
            (e > 0).then_some((i, e))
        })
        .collect();
    let s: Vec<Var> = used
        .iter()
        .map(|(i, _)| Var::new(&format!("s{}", i + 1)))
        .collect();
    let lead = Poly::monomial(
        Monomial::from_pairs(s.iter().cloned().zip(used.iter().map(|(_, e)| *e))),
        c.clone(),
    );
    let mut torus = BasicFormula::new(s.clone());
    s.iter().for_each(|v| torus.add_neq(Poly::var(v.clone())));
    let fibre = chi_closed_form(&eps.constrain(torus, &lead));
    let alphas: Vec<u32> = used.iter().map(|(_, e)| *e).collect();
    let unused = (d - used.len()) * n;
    let mut out = ClassExpr::zero();
    for ks in compositions(&alphas, n) {
        let free = unused + ks.iter().map(|k| n - k).sum::<usize>();
        out = &out + &fibre.mul_l(free as i64);
    }
    Some(out.mul_l(-((n * d) as i64)))
}

/// `[X_(n,f)^eps] L^(-nd)`: exact for monomials, through the catalog when it applies,
/// otherwise `chi_c` by cells when `n d <= cad_cap`.
pub fn zeta_coefficient_direct(
    f: &Poly,
    vars: &[Var],
    n: usize,
    eps: EpsilonSymbol,
    ev: &Evaluator,
    cad_cap: usize,
) -> Result<DirectCoefficient, ArcError> {
    let jet = jet_formula(f, vars, n, eps)?;
    if let Some(c) = monomial_coefficient(f, vars, n, eps) {
        return Ok(DirectCoefficient::Class(c));
    }
    let nd = (n * vars.len()) as i64;
    let why = match beta_formula(&jet.formula, ev) {
        Ok(v) => return Ok(DirectCoefficient::Class(v.shift(-nd).to_class())),
        Err(e) => e.to_string(),
    };
    if jet.formula.nvars() <= cad_cap {
        let opts = CadOptions {
            cap: cad_cap,
            ..CadOptions::default()
        };
        if let Ok(x) = euler_compact_with(&jet.formula, &opts) {
            let sign = if nd % 2 == 0 { 1 } else { -1 };
            return Ok(DirectCoefficient::Euler(sign * x));
        }
    }
    Err(ArcError::Unsupported { n, why })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    /// Equal virtual Poincaré polynomials.
    Match,
    /// Equal at `u = -1` only; the finer comparison was not available.
    EulerMatch,
    Mismatch,
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRow {
    pub n: usize,
    pub series: ClassExpr,
    pub series_beta: Option<VirtualPoly>,
    pub direct: Option<DirectCoefficient>,
    pub direct_beta: Option<VirtualPoly>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub eps: EpsilonSymbol,
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn first_mismatch(&self) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.status == Status::Mismatch)
            .map(|r| r.n)
    }

    pub fn all_match(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.status, Status::Match | Status::EulerMatch))
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n | zeta series | direct | status")?;
        for r in &self.rows {
            let s = r
                .series_beta
                .as_ref()
                .map_or_else(|| r.series.to_string(), VirtualPoly::to_string);
            let d = match (&r.direct_beta, &r.direct) {
                (Some(v), _) => v.to_string(),
                (None, Some(d)) => d.to_string(),
                (None, None) => "-".to_string(),
            };
            let st = match &r.status {
                Status::Match => "match".to_string(),
                Status::EulerMatch => "match (chi_c)".to_string(),
                Status::Mismatch => "MISMATCH".to_string(),
                Status::Unavailable(w) => format!("unavailable: {w}"),
            };
            writeln!(f, "{} | {} | {} | {}", r.n, s, d, st)?;
        }
        Ok(())
    }
}

/// Compares the expansion of the resolution formula with direct arc computations.
pub fn oracle_compare(
    f: &Poly,
    vars: &[Var],
    res: &ResolutionData,
    eps: EpsilonSymbol,
    n_max: usize,
    ev: &Evaluator,
    cad_cap: usize,
) -> Result<OracleReport, ArcError> {
    let z = zeta_from_resolution(res, eps)?;
    let series = series_expand(&z, n_max);
    let mut rows = Vec::new();
    for (k, s) in series.into_iter().enumerate() {
        let n = k + 1;
        let series_beta = beta_class(&s, ev).ok();
        let direct = zeta_coefficient_direct(f, vars, n, eps, ev, cad_cap);
        let direct_beta = match &direct {
            Ok(DirectCoefficient::Class(c)) => beta_class(c, ev).ok(),
            _ => None,
        };
        let status = match (&series_beta, &direct_beta, &direct) {
            (Some(a), Some(b), _) => {
                if a == b {
                    Status::Match
                } else {
                    Status::Mismatch
                }
            }
            (_, _, Err(e)) => Status::Unavailable(e.to_string()),
            (_, _, Ok(d)) => {
                let lhs = euler_of_class(&s, ev, cad_cap);
                let rhs = match d {
                    DirectCoefficient::Euler(x) => Ok(*x),
                    DirectCoefficient::Class(c) => euler_of_class(c, ev, cad_cap),
                };
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => Status::EulerMatch,
                    (Ok(_), Ok(_)) => Status::Mismatch,
                    (Err(e), _) | (_, Err(e)) => Status::Unavailable(e.to_string()),
                }
            }
        };
        rows.push(OracleRow {
            n,
            series: s,
            series_beta,
            direct: direct.ok(),
            direct_beta,
            status,
        });
    }
    Ok(OracleReport { eps, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly;

    fn xy() -> (Poly, Vec<Var>) {
        (
            parse_poly("x*y", &["x", "y"]).unwrap(),
            vec![Var::new("x"), Var::new("y")],
        )
    }

    #[test]
    fn jets_of_xy() {
        let (f, vs) = xy();
        let j = jet_formula(&f, &vs, 2, EpsilonSymbol::Plus).unwrap();
        assert_eq!(
            j.formula.to_string(),
            "vars a1_1, a1_2, a2_1, a2_2; a1_1*a2_1 - 1 = 0"
        );
        let j = jet_formula(&f, &vs, 1, EpsilonSymbol::Naive).unwrap();
        assert_eq!(j.formula.neqs(), &[Poly::zero()]);
        let x = parse_poly("x", &["x"]).unwrap();
        let j = jet_formula(&x, &[Var::new("x")], 1, EpsilonSymbol::Plus).unwrap();
        assert_eq!(j.formula.to_string(), "vars a1_1; a1_1 - 1 = 0");
        let g = parse_poly("x + 1", &["x"]).unwrap();
        assert_eq!(
            jet_formula(&g, &[Var::new("x")], 2, EpsilonSymbol::Plus),
            Err(ArcError::NotAtOrigin)
        );
    }

    #[test]
    fn monomial_path() {
        let (f, vs) = xy();
        let ev = Evaluator::default();
        let beta = |n| {
            let c = monomial_coefficient(&f, &vs, n, EpsilonSymbol::Plus).unwrap();
            beta_class(&c, &ev).unwrap().to_string()
        };
        assert_eq!(beta(1), "0");
        assert_eq!(beta(2), "u^-1 - u^-2");
        assert_eq!(beta(3), "2*u^-2 - 2*u^-3");
        let x2 = parse_poly("x^2", &["x"]).unwrap();
        let c = monomial_coefficient(&x2, &[Var::new("x")], 2, EpsilonSymbol::Minus).unwrap();
        assert!(beta_class(&c, &ev).unwrap().is_zero());
    }

    #[test]
    fn monomial_and_generic_paths_agree() {
        let (f, vs) = xy();
        let ev = Evaluator::default();
        for eps in EpsilonSymbol::ALL {
            for n in 1..=3 {
                let exact =
                    beta_class(&monomial_coefficient(&f, &vs, n, eps).unwrap(), &ev).unwrap();
                let jet = jet_formula(&f, &vs, n, eps).unwrap();
                let generic = beta_formula(&jet.formula, &ev)
                    .unwrap()
                    .shift(-2 * n as i64);
                assert_eq!(exact, generic, "eps {eps} n {n}");
            }
        }
    }
}
