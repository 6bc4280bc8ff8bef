use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_integer::Integer;

use crate::catalog::VirtualPoly;
use crate::formula::{parse_formula, parse_poly, BasicFormula};
use crate::k0::ClassExpr;
use crate::poly::{Poly, Rational, Var};

/// Which condition on the leading coefficient `a` of `f(gamma(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EpsilonSymbol {
    Naive,
    Plus,
    Minus,
    Gt,
    Lt,
}

impl EpsilonSymbol {
    pub const ALL: [EpsilonSymbol; 5] = [
        EpsilonSymbol::Naive,
        EpsilonSymbol::Plus,
        EpsilonSymbol::Minus,
        EpsilonSymbol::Gt,
        EpsilonSymbol::Lt,
    ];

    /// The four symbols with a cover of their own.
    pub const SIGNED: [EpsilonSymbol; 4] = [
        EpsilonSymbol::Plus,
        EpsilonSymbol::Minus,
        EpsilonSymbol::Gt,
        EpsilonSymbol::Lt,
    ];

    /// Adds `a ?_eps` to `f`.
    pub fn constrain(self, f: BasicFormula, a: &Poly) -> BasicFormula {
        match self {
            EpsilonSymbol::Naive => f.with_neq(a.clone()),
            EpsilonSymbol::Plus => f.with_eq(a - &Poly::one()),
            EpsilonSymbol::Minus => f.with_eq(a + &Poly::one()),
            EpsilonSymbol::Gt => f.with_pos(a.clone()),
            EpsilonSymbol::Lt => f.with_pos(-a),
        }
    }
}

impl FromStr for EpsilonSymbol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "naive" => Ok(EpsilonSymbol::Naive),
            "1" | "+1" => Ok(EpsilonSymbol::Plus),
            "-1" => Ok(EpsilonSymbol::Minus),
            "gt" | ">" => Ok(EpsilonSymbol::Gt),
            "lt" | "<" => Ok(EpsilonSymbol::Lt),
            other => Err(format!("unknown epsilon `{other}` (naive, 1, -1, gt, lt)")),
        }
    }
}

impl fmt::Display for EpsilonSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpsilonSymbol::Naive => "naive",
            EpsilonSymbol::Plus => "1",
            EpsilonSymbol::Minus => "-1",
            EpsilonSymbol::Gt => "gt",
            EpsilonSymbol::Lt => "lt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: u32,
    pub n: u32,
    /// `Some(nu)` exactly for exceptional components.
    pub nu: Option<u32>,
}

impl Component {
    pub fn is_exceptional(&self) -> bool {
        self.nu.is_some()
    }
}

/// A piece of `E_I^0` in one chart, or an overlap of charts when `sign` is negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub sign: i64,
    pub base: BasicFormula,
    pub unit: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub subset: BTreeSet<u32>,
    pub charts: Vec<Chart>,
    pub covers: BTreeMap<EpsilonSymbol, ClassExpr>,
}

/// Data for checking the set-theoretic Milnor fibres: `f`, `c` and the ball radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreData {
    pub vars: Vec<Var>,
    pub f: Poly,
    pub c: Rational,
    pub radius: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionData {
    pub dim: usize,
    pub function: Option<FibreData>,
    pub components: Vec<Component>,
    pub strata: Vec<Stratum>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("cannot read resolution file: {0}")]
    Io(String),
    #[error("{}", .0.join("; "))]
    Invalid(Vec<String>),
}

impl ResolutionData {
    pub fn component(&self, id: u32) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    /// `gcd` of the multiplicities over a stratum.
    pub fn m(&self, s: &Stratum) -> u32 {
        s.subset
            .iter()
            .filter_map(|i| self.component(*i))
            .fold(0, |g, c| g.gcd(&c.n))
    }

    pub fn meets_exceptional(&self, s: &Stratum) -> bool {
        s.subset
            .iter()
            .any(|i| self.component(*i).is_some_and(Component::is_exceptional))
    }

    /// Lists every structural problem.
    pub fn validate(&self) -> Result<(), ResolutionError> {
        let mut errs = Vec::new();
        let mut ids = BTreeSet::new();
        for c in &self.components {
            if !ids.insert(c.id) {
                errs.push(format!("component {} declared twice", c.id));
            }
            if c.n == 0 {
                errs.push(format!("component {}: N must be at least 1", c.id));
            }
            if c.nu == Some(0) {
                errs.push(format!("component {}: nu must be at least 1", c.id));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.strata {
            let name = subset_text(&s.subset);
            if s.subset.is_empty() {
                errs.push("empty stratum".to_string());
            }
            if !seen.insert(s.subset.clone()) {
                errs.push(format!("stratum {name} declared twice"));
            }
            for i in &s.subset {
                if !ids.contains(i) {
                    errs.push(format!("stratum {name}: unknown component {i}"));
                }
            }
            if s.charts.is_empty() && s.covers.len() < EpsilonSymbol::SIGNED.len() {
                errs.push(format!(
                    "stratum {name}: needs charts or a cover class for every epsilon"
                ));
            }
            for ch in &s.charts {
                if ch.unit.is_zero() {
                    errs.push(format!("stratum {name}: zero unit"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ResolutionError::Invalid(errs))
        }
    }

    pub fn load(path: &Path) -> Result<Self, ResolutionError> {
        let text = std::fs::read_to_string(path).map_err(|e| ResolutionError::Io(e.to_string()))?;
        text.parse()
    }
}

pub(crate) fn subset_text(s: &BTreeSet<u32>) -> String {
    format!(
        "{{{}}}",
        s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    )
}

/// Parses an `L`-polynomial such as `2*L - 1`.
pub fn parse_l_class(text: &str) -> Result<ClassExpr, String> {
    VirtualPoly::parse_in(text, "L")
        .map(|v| v.to_class())
        .map_err(|e| e.to_string())
}

fn key_values(text: &str) -> BTreeMap<String, String> {
    text.split(',')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

impl FromStr for ResolutionData {
    type Err = ResolutionError;

    fn from_str(text: &str) -> Result<Self, ResolutionError> {
        let mut dim = None;
        let mut vars: Option<Vec<Var>> = None;
        let mut f_text: Option<(usize, String)> = None;
        let mut fibre: Option<(usize, BTreeMap<String, String>)> = None;
        let mut components = Vec::new();
        let mut strata: Vec<Stratum> = Vec::new();
        let mut versioned = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: &str| ResolutionError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let rest = rest.trim();
            if !versioned {
                if head != "bsa-resolution" || rest != "1" {
                    return Err(err("expected header `bsa-resolution 1`"));
                }
                versioned = true;
                continue;
            }
            match head {
                "dim" => dim = Some(rest.parse::<usize>().map_err(|_| err("bad dimension"))?),
                "vars" => {
                    vars = Some(rest.split(',').map(|v| Var::new(v.trim())).collect());
                }
                "function" => f_text = Some((line, rest.to_string())),
                "fibre" => fibre = Some((line, key_values(rest))),
                "component" => {
                    let mut words = rest.split_whitespace();
                    let id = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("bad component id"))?;
                    let (mut n, mut nu, mut exceptional) = (None, None, false);
                    for w in words {
                        match w.split_once('=') {
                            Some(("N", v)) => n = Some(v.parse().map_err(|_| err("bad N"))?),
                            Some(("nu", v)) => nu = Some(v.parse().map_err(|_| err("bad nu"))?),
                            None if w == "exceptional" => exceptional = true,
                            _ => return Err(err(&format!("unknown component field `{w}`"))),
                        }
                    }
                    let n = n.ok_or_else(|| err("component needs N"))?;
                    if exceptional != nu.is_some() {
                        return Err(err("nu is given exactly for exceptional components"));
                    }
                    components.push(Component { id, n, nu });
                }
                "stratum" => {
                    let subset = rest
                        .split_whitespace()
                        .map(|w| w.parse::<u32>())
                        .collect::<Result<BTreeSet<_>, _>>()
                        .map_err(|_| err("bad stratum subset"))?;
                    strata.push(Stratum {
                        subset,
                        charts: Vec::new(),
                        covers: BTreeMap::new(),
                    });
                }
                "chart" => {
                    let s = strata
                        .last_mut()
                        .ok_or_else(|| err("chart outside a stratum"))?;
                    let (sign, rest) = match rest.split_at(1) {
                        ("+", r) => (1, r),
                        ("-", r) => (-1, r),
                        _ => return Err(err("chart sign must be + or -")),
                    };
                    let (formula, unit) = rest
                        .split_once('|')
                        .ok_or_else(|| err("expected `formula | unit p`"))?;
                    let base = parse_formula(formula.trim()).map_err(|e| err(&e.to_string()))?;
                    let unit = unit
                        .trim()
                        .strip_prefix("unit")
                        .ok_or_else(|| err("expected `unit`"))?;
                    let names: Vec<&str> = base.vars().iter().map(Var::name).collect();
                    let unit = parse_poly(unit.trim(), &names).map_err(|e| err(&e.to_string()))?;
                    s.charts.push(Chart { sign, base, unit });
                }
                "cover" => {
                    let s = strata
                        .last_mut()
                        .ok_or_else(|| err("cover outside a stratum"))?;
                    let (eps, class) = rest
                        .split_once('=')
                        .ok_or_else(|| err("expected `cover eps = class`"))?;
                    let eps: EpsilonSymbol = eps.parse().map_err(|e: String| err(&e))?;
                    if eps == EpsilonSymbol::Naive {
                        return Err(err("the naive cover is the sum of gt and lt"));
                    }
                    let class = parse_l_class(class.trim()).map_err(|e| err(&e))?;
                    s.covers.insert(eps, class);
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        if !versioned {
            return Err(ResolutionError::Syntax {
                line: 1,
                msg: "empty file".into(),
            });
        }
        let dim = dim.ok_or(ResolutionError::Syntax {
            line: 1,
            msg: "missing `dim`".into(),
        })?;
        let function = match (f_text, &vars) {
            (None, _) => None,
            (Some((line, _)), None) => {
                return Err(ResolutionError::Syntax {
                    line,
                    msg: "`function` needs `vars`".into(),
                })
            }
            (Some((line, t)), Some(vs)) => {
                let names: Vec<&str> = vs.iter().map(Var::name).collect();
                let f = parse_poly(&t, &names).map_err(|e| ResolutionError::Syntax {
                    line,
                    msg: e.to_string(),
                })?;
                let (c, radius) = match &fibre {
                    Some((fl, kv)) => {
                        let get = |k: &str| {
                            kv.get(k)
                                .and_then(|v| parse_poly(v, &[]).ok())
                                .and_then(|p| p.constant_value())
                                .ok_or(ResolutionError::Syntax {
                                    line: *fl,
                                    msg: format!("fibre needs `{k} = q`"),
                                })
                        };
                        (get("c")?, get("radius")?)
                    }
                    None => {
                        return Err(ResolutionError::Syntax {
                            line,
                            msg: "`function` needs `fibre`".into(),
                        })
                    }
                };
                Some(FibreData {
                    vars: vs.clone(),
                    f,
                    c,
                    radius,
                })
            }
        };
        let data = ResolutionData {
            dim,
            function,
            components,
            strata,
        };
        data.validate()?;
        Ok(data)
    }
}
