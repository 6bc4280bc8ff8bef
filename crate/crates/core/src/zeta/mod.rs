//! Motivic zeta functions and real Milnor fibres from resolution data.

mod resolution;

use std::collections::BTreeSet;
use std::fmt;

use resolution::subset_text;
pub use resolution::{
    parse_l_class, Chart, Component, EpsilonSymbol, FibreData, ResolutionData, ResolutionError,
    Stratum,
};

use crate::cad::{euler_compact_with, CadError, CadOptions};
use crate::catalog::{beta_descriptor, Evaluator, Unsupported};
use crate::formula::BasicFormula;
use crate::k0::{chi_closed_form, odd_symmetry, ClassExpr};
use crate::poly::{Dyadic, Poly, Var};

/// `L^-nu T^N / (1 - L^-nu T^N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub nu: u32,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaTerm {
    pub stratum: BTreeSet<u32>,
    pub coef: ClassExpr,
    pub factors: Vec<Factor>,
}

/// A sum of coefficients times products of `Factor`s, never brought to one fraction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZetaRational {
    pub terms: Vec<ZetaTerm>,
}

impl ZetaRational {
    /// Coefficients of `T^1 .. T^order`.
    pub fn series(&self, order: usize) -> Vec<ClassExpr> {
        let mut out = vec![ClassExpr::zero(); order + 1];
        for t in &self.terms {
            let mut acc = vec![ClassExpr::zero(); order + 1];
            acc[0] = t.coef.clone();
            for f in &t.factors {
                let mut next = vec![ClassExpr::zero(); order + 1];
                for (d, c) in acc.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut k = 1;
                    while d + k * f.n as usize <= order {
                        let w = ClassExpr::l_pow(-(k as i64) * f.nu as i64);
                        next[d + k * f.n as usize] = &next[d + k * f.n as usize] + &(c * &w);
                        k += 1;
                    }
                }
                acc = next;
            }
            for (d, c) in acc.into_iter().enumerate() {
                out[d] = &out[d] + &c;
            }
        }
        out.remove(0);
        out
    }

    /// Each factor tends to `-1` as `T -> infinity`.
    pub fn limit_at_infinity(&self) -> ClassExpr {
        self.terms.iter().fold(ClassExpr::zero(), |acc, t| {
            let sign = if t.factors.len() % 2 == 0 { 1 } else { -1 };
            &acc + &t.coef.scale(&Dyadic::from_int(sign))
        })
    }

    pub fn add(&self, other: &ZetaRational) -> ZetaRational {
        ZetaRational {
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})", t.coef)?;
            for x in &t.factors {
                write!(
                    f,
                    "*[L^-{nu}*T^{n}/(1 - L^-{nu}*T^{n})]",
                    nu = x.nu,
                    n = x.n
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZetaError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("stratum {0}: no cover for epsilon {1}")]
    MissingCover(String, EpsilonSymbol),
    #[error("{0}")]
    Unsupported(#[from] Unsupported),
    #[error("cell decomposition: {0}")]
    Cad(#[from] CadError),
    #[error("class is not an integer at u = -1: {0}")]
    NotIntegral(String),
    #[error("resolution has no `function` record")]
    NoFunction,
}

fn fresh_var(taken: &[Var], stem: &str) -> Var {
    let mut name = stem.to_string();
    while taken.iter().any(|v| v.name() == name) {
        name.push('\'');
    }
    Var::new(&name)
}

/// `R_U^eps = {(x, t) : x in base, t^m u(x) ?_eps}`.
pub fn cover_formula(chart: &Chart, m: u32, eps: EpsilonSymbol) -> BasicFormula {
    let t = fresh_var(chart.base.vars(), "t");
    let mut vars = chart.base.vars().to_vec();
    vars.push(t.clone());
    let mut f = BasicFormula::new(vars);
    chart.base.eqs().iter().for_each(|p| f.add_eq(p.clone()));
    chart.base.neqs().iter().for_each(|p| f.add_neq(p.clone()));
    chart.base.pos().iter().for_each(|p| f.add_pos(p.clone()));
    chart.base.geqs().iter().for_each(|p| f.add_geq(p.clone()));
    let a = &Poly::var(t).pow(m) * &chart.unit;
    eps.constrain(f, &a)
}

/// `sum_S (-1)^(|S|+1) [R_(cap U_s)]`, with the signs carried by the charts.
pub fn glue_cover(charts: &[Chart], m: u32, eps: EpsilonSymbol) -> ClassExpr {
    match eps {
        EpsilonSymbol::Naive => {
            &glue_cover(charts, m, EpsilonSymbol::Gt) + &glue_cover(charts, m, EpsilonSymbol::Lt)
        }
        _ => charts.iter().fold(ClassExpr::zero(), |acc, ch| {
            &acc + &chi_closed_form(&cover_formula(ch, m, eps)).scale(&Dyadic::from_int(ch.sign))
        }),
    }
}

/// Where a stratum's cover class comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverSource {
    /// The class written in the file when present, otherwise the charts.
    Prefer,
    Charts,
}

pub fn stratum_cover(
    res: &ResolutionData,
    s: &Stratum,
    eps: EpsilonSymbol,
    src: CoverSource,
) -> Result<ClassExpr, ZetaError> {
    if eps == EpsilonSymbol::Naive {
        return Ok(&stratum_cover(res, s, EpsilonSymbol::Gt, src)?
            + &stratum_cover(res, s, EpsilonSymbol::Lt, src)?);
    }
    if src == CoverSource::Prefer {
        if let Some(c) = s.covers.get(&eps) {
            return Ok(c.clone());
        }
    }
    if s.charts.is_empty() {
        return Err(ZetaError::MissingCover(subset_text(&s.subset), eps));
    }
    Ok(glue_cover(&s.charts, res.m(s), eps))
}

fn l_minus_one() -> ClassExpr {
    &ClassExpr::l() - &ClassExpr::one()
}

pub fn zeta_from_resolution_with(
    res: &ResolutionData,
    eps: EpsilonSymbol,
    src: CoverSource,
) -> Result<ZetaRational, ZetaError> {
    res.validate()?;
    let mut terms = Vec::new();
    for s in res.strata.iter().filter(|s| res.meets_exceptional(s)) {
        let cover = stratum_cover(res, s, eps, src)?;
        let coef = &l_minus_one().pow(s.subset.len() as u32 - 1) * &cover;
        let factors = s
            .subset
            .iter()
            .map(|i| {
                let c = res.component(*i).expect("validated");
                Factor {
                    nu: c.nu.unwrap_or(1),
                    n: c.n,
                }
            })
            .collect();
        terms.push(ZetaTerm {
            stratum: s.subset.clone(),
            coef,
            factors,
        });
    }
    Ok(ZetaRational { terms })
}

pub fn zeta_from_resolution(
    res: &ResolutionData,
    eps: EpsilonSymbol,
) -> Result<ZetaRational, ZetaError> {
    zeta_from_resolution_with(res, eps, CoverSource::Prefer)
}

pub fn series_expand(z: &ZetaRational, order: usize) -> Vec<ClassExpr> {
    z.series(order)
}

/// `S_f^eps = -lim_(T -> infinity) Z_f^eps(T)`.
pub fn milnor_fibre(res: &ResolutionData, eps: EpsilonSymbol) -> Result<ClassExpr, ZetaError> {
    Ok(-zeta_from_resolution(res, eps)?.limit_at_infinity())
}

/// `chi_c` of a class: `beta` at `u = -1`, atoms outside the catalog through cells.
pub fn euler_of_class(c: &ClassExpr, ev: &Evaluator, cad_cap: usize) -> Result<i64, ZetaError> {
    let mut total = Dyadic::zero();
    for (a, coef) in odd_symmetry(c).terms() {
        let sign = if a.l.rem_euclid(2) == 0 { 1 } else { -1 };
        let chi = match &a.desc {
            None => Dyadic::one(),
            Some(d) => match beta_descriptor(d, ev) {
                Ok(v) => v.at_minus_one(),
                Err(u) => {
                    let opts = CadOptions {
                        cap: cad_cap,
                        ..CadOptions::default()
                    };
                    match euler_compact_with(&d.to_formula(), &opts) {
                        Ok(x) => Dyadic::from_int(x),
                        Err(CadError::CapExceeded { .. }) => return Err(ZetaError::Unsupported(u)),
                        Err(e) => return Err(e.into()),
                    }
                }
            },
        };
        total += &(&(coef * &chi) * &Dyadic::from_int(sign));
    }
    total
        .to_i64()
        .ok_or_else(|| ZetaError::NotIntegral(c.to_string()))
}

/// Set-theoretic fibres attached to `f`, `c` and the closed ball of the given radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreFormulas {
    pub closed: BasicFormula,
    pub open: BasicFormula,
    /// `{f >= 0}` or `{f <= 0}` on the sphere, for `gt` and `lt`.
    pub boundary: Option<BasicFormula>,
}

pub fn fibre_formulas(fd: &FibreData, eps: EpsilonSymbol) -> Option<FibreFormulas> {
    let r2 = Poly::constant(&fd.radius * &fd.radius);
    let norm = fd
        .vars
        .iter()
        .fold(Poly::zero(), |acc, v| &acc + &Poly::var(v.clone()).pow(2));
    let inside = &r2 - &norm;
    let c = Poly::constant(fd.c.clone());
    let base = BasicFormula::new(fd.vars.clone());
    let (level, boundary): (
        Box<dyn Fn(BasicFormula) -> BasicFormula>,
        Option<BasicFormula>,
    ) = match eps {
        EpsilonSymbol::Naive => return None,
        EpsilonSymbol::Plus => (Box::new(|g: BasicFormula| g.with_eq(&fd.f - &c)), None),
        EpsilonSymbol::Minus => (Box::new(|g: BasicFormula| g.with_eq(&fd.f + &c)), None),
        EpsilonSymbol::Gt => (
            Box::new(|g: BasicFormula| g.with_pos(fd.f.clone()).with_pos(&c - &fd.f)),
            Some({
                let mut g = base.clone().with_eq(norm.clone() - r2.clone());
                g.add_geq(fd.f.clone());
                g
            }),
        ),
        EpsilonSymbol::Lt => (
            Box::new(|g: BasicFormula| g.with_pos(-&fd.f).with_pos(&fd.f + &c)),
            Some({
                let mut g = base.clone().with_eq(norm.clone() - r2.clone());
                g.add_geq(-&fd.f);
                g
            }),
        ),
    };
    let mut closed = level(base.clone());
    closed.add_geq(inside.clone());
    let open = level(base).with_pos(inside);
    Some(FibreFormulas {
        closed,
        open,
        boundary,
    })
}

/// `chi_c(S_f^eps)` next to the Euler characteristics of the fibres it should equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorCheck {
    pub chi: i64,
    pub closed: Option<i64>,
    /// Already multiplied by `(-1)^(d+1)`.
    pub open: Option<i64>,
    /// `-chi_c(G)` for `gt` and `lt`.
    pub boundary: Option<i64>,
}

impl MilnorCheck {
    /// Each fibre value that disagrees with `chi`, by name.
    pub fn disagreements(&self) -> Vec<(&'static str, i64)> {
        [
            ("closed fibre", self.closed),
            ("open fibre", self.open),
            ("G", self.boundary),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.filter(|v| *v != self.chi).map(|v| (name, v)))
        .collect()
    }
}

/// Compares `chi_c(S_f^eps)` with the fibres of the `function` record; fibres are absent for `naive`.
pub fn milnor_check(
    res: &ResolutionData,
    eps: EpsilonSymbol,
    ev: &Evaluator,
    cad_cap: usize,
) -> Result<MilnorCheck, ZetaError> {
    let chi = euler_of_class(&milnor_fibre(res, eps)?, ev, cad_cap)?;
    let mut out = MilnorCheck {
        chi,
        closed: None,
        open: None,
        boundary: None,
    };
    let Some(ff) = res.function.as_ref().and_then(|fd| fibre_formulas(fd, eps)) else {
        return Ok(out);
    };
    let opts = CadOptions {
        cap: cad_cap,
        ..CadOptions::default()
    };
    let sign = if res.dim % 2 == 1 { 1 } else { -1 };
    out.closed = Some(euler_compact_with(&ff.closed, &opts)?);
    out.open = Some(sign * euler_compact_with(&ff.open, &opts)?);
    if let Some(g) = &ff.boundary {
        out.boundary = Some(-euler_compact_with(g, &opts)?);
    }
    Ok(out)
}
