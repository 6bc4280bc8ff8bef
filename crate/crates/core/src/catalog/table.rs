use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use super::{Evaluator, VirtualPoly};
use crate::cad::{euler_compact_with, CadOptions};
use crate::formula::{parse_formula, BasicFormula};
use crate::poly::{Poly, Var};

/// Systems with more variables than this are keyed without symmetrization.
const SYMMETRIZE_UP_TO: usize = 5;

/// One `formula := class` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub line: usize,
    pub formula: BasicFormula,
    pub value: VirtualPoly,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: variable `{name}` does not occur in any equation")]
    FreeVariable { line: usize, name: String },
    #[error("line {line}: only equations are allowed")]
    NotAlgebraic { line: usize },
    #[error("line {line}: same system as line {first} with a different class")]
    Conflict { line: usize, first: usize },
    #[error("cannot read table: {0}")]
    Io(String),
}

/// Problems found by `ClassTable::validate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableIssue {
    NonIntegral { line: usize },
    DegreeTooHigh { line: usize },
    RuleMismatch { line: usize, rules: VirtualPoly },
    EulerMismatch { line: usize, cad: i64 },
}

impl fmt::Display for TableIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableIssue::NonIntegral { line } => {
                write!(f, "line {line}: class has non-integer coefficients")
            }
            TableIssue::DegreeTooHigh { line } => {
                write!(f, "line {line}: degree exceeds the number of variables")
            }
            TableIssue::RuleMismatch { line, rules } => {
                write!(f, "line {line}: rules give {rules}")
            }
            TableIssue::EulerMismatch { line, cad } => {
                write!(f, "line {line}: cell decomposition gives chi_c = {cad}")
            }
        }
    }
}

/// Known classes of algebraic systems, keyed up to signed variable permutations.
#[derive(Debug, Clone, Default)]
pub struct ClassTable {
    entries: Vec<TableEntry>,
    index: HashMap<Vec<Poly>, usize>,
}

impl ClassTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut t = ClassTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let (body, provenance) = match raw.split_once('#') {
                Some((b, p)) => (b, p.trim().to_string()),
                None => (raw, String::new()),
            };
            if body.trim().is_empty() {
                continue;
            }
            let (lhs, rhs) = body.split_once(":=").ok_or_else(|| TableError::Parse {
                line,
                msg: "expected `formula := class`".into(),
            })?;
            let formula = parse_formula(lhs.trim()).map_err(|e| TableError::Parse {
                line,
                msg: e.to_string(),
            })?;
            let value = VirtualPoly::parse(rhs.trim()).map_err(|e| TableError::Parse {
                line,
                msg: e.to_string(),
            })?;
            t.insert(TableEntry {
                line,
                formula,
                value,
                provenance,
            })?;
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path).map_err(|e| TableError::Io(e.to_string()))?;
        ClassTable::parse(&text)
    }

    pub fn insert(&mut self, e: TableEntry) -> Result<(), TableError> {
        let f = &e.formula;
        if !f.neqs().is_empty() || !f.pos().is_empty() || f.has_geq() {
            return Err(TableError::NotAlgebraic { line: e.line });
        }
        let used: BTreeSet<Var> = f.eqs().iter().flat_map(|p| p.vars()).collect();
        if let Some(v) = f.vars().iter().find(|v| !used.contains(v)) {
            return Err(TableError::FreeVariable {
                line: e.line,
                name: v.name().to_string(),
            });
        }
        let key = canonical_key(f.eqs());
        if let Some(&k) = self.index.get(&key) {
            if self.entries[k].value != e.value {
                return Err(TableError::Conflict {
                    line: e.line,
                    first: self.entries[k].line,
                });
            }
            return Ok(());
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(e);
        Ok(())
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, key: &[Poly]) -> Option<&VirtualPoly> {
        self.index.get(key).map(|&k| &self.entries[k].value)
    }

    /// Checks every entry against the rules alone and, within `cad_cap`, against `chi_c`.
    pub fn validate(&self, cad_cap: usize) -> Vec<TableIssue> {
        let rules = Evaluator::bare();
        let mut issues = Vec::new();
        for e in &self.entries {
            let n = e.formula.nvars();
            if !e.value.is_integral() {
                issues.push(TableIssue::NonIntegral { line: e.line });
            }
            if e.value.degree().is_some_and(|d| d > n as i64) {
                issues.push(TableIssue::DegreeTooHigh { line: e.line });
            }
            let amb: BTreeSet<Var> = e.formula.vars().iter().cloned().collect();
            if let Ok(v) = rules.eval_in(&amb, e.formula.eqs()) {
                if v != e.value {
                    issues.push(TableIssue::RuleMismatch {
                        line: e.line,
                        rules: v,
                    });
                }
            }
            if n <= cad_cap {
                let opts = CadOptions {
                    cap: cad_cap,
                    ..CadOptions::default()
                };
                if let Ok(chi) = euler_compact_with(&e.formula, &opts) {
                    let expect = e.value.at_minus_one().to_i64();
                    if expect != Some(chi) {
                        issues.push(TableIssue::EulerMismatch {
                            line: e.line,
                            cad: chi,
                        });
                    }
                }
            }
        }
        issues
    }
}

/// Normal form of an equation system under `x_i -> ±x_j`.
pub fn canonical_key(eqs: &[Poly]) -> Vec<Poly> {
    let vars: Vec<Var> = eqs
        .iter()
        .flat_map(|p| p.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = vars.len();
    let targets: Vec<Poly> = (0..k)
        .map(|i| Poly::var(Var::new(&format!("\u{1}k{i}"))))
        .collect();
    let keyed = |perm: &[usize], signs: u32| {
        let map: BTreeMap<Var, Poly> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let t = &targets[perm[i]];
                (v.clone(), if signs >> i & 1 == 1 { -t } else { t.clone() })
            })
            .collect();
        let mut out: Vec<Poly> = eqs
            .iter()
            .map(|p| p.substitute_all(&map).primitive())
            .collect();
        out.sort();
        out.dedup();
        out
    };
    let identity: Vec<usize> = (0..k).collect();
    if k > SYMMETRIZE_UP_TO {
        return keyed(&identity, 0);
    }
    let mut best: Option<Vec<Poly>> = None;
    for perm in permutations(k) {
        for signs in 0..1u32 << k {
            let cand = keyed(&perm, signs);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, k - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    const FIBRE: &str = "\
vars x, y, z; x*y = 1/4, z^2 = 1 - x^2 - y^2 := 2*u + 2   # two spheres over the disc arcs
vars x, y, z; x*y = 1/4, z^2 = x^2 + y^2 - 1 := 2*u - 2   # outside the disc
";

    #[test]
    fn parses_and_validates() {
        let t = ClassTable::parse(FIBRE).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.validate(3).is_empty(), "{:?}", t.validate(3));
    }

    #[test]
    fn key_ignores_names_and_signs() {
        let a = canonical_key(&[parse_poly_free("x*y - 1").unwrap()]);
        let b = canonical_key(&[parse_poly_free("-a*b - 1").unwrap()]);
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            ClassTable::parse("vars x, y; x = 0 := 1"),
            Err(TableError::FreeVariable { .. })
        ));
        assert!(matches!(
            ClassTable::parse("vars x; x > 0 := u"),
            Err(TableError::NotAlgebraic { .. })
        ));
        assert!(matches!(
            ClassTable::parse("vars x; x^2 = 2 := 2\nvars y; y^2 = 2 := 3"),
            Err(TableError::Conflict { line: 2, first: 1 })
        ));
    }

    #[test]
    fn wrong_entry_is_flagged() {
        let t = ClassTable::parse("vars x, y; x^2 + y^2 = 1 := 2*u").unwrap();
        let issues = t.validate(3);
        assert!(issues
            .iter()
            .any(|i| matches!(i, TableIssue::RuleMismatch { .. })));
        assert!(issues
            .iter()
            .any(|i| matches!(i, TableIssue::EulerMismatch { .. })));
    }
}
