use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::formula::BasicFormula;
use crate::poly::{Poly, Var};

/// Prefix reserved for the auxiliary variables `Y` of the double covers.
pub const COVER_PREFIX: &str = "_y";

pub fn is_cover(v: &Var) -> bool {
    v.name().starts_with(COVER_PREFIX)
}

/// An inequality-free system `{P_i = 0, Q_j != 0}`.
///
/// Only constrained variables are part of a descriptor; free variables are
/// carried by the enclosing atom as a power of `L`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Descriptor {
    eqs: Vec<Poly>,
    neqs: Vec<Poly>,
}

fn normalize(p: &Poly) -> Poly {
    if p.is_zero() {
        p.clone()
    } else {
        p.monic()
    }
}

fn sorted_unique(mut v: Vec<Poly>) -> Vec<Poly> {
    v.sort();
    v.dedup();
    v
}

impl Descriptor {
    /// Builds the canonical descriptor; `None` when nothing is constrained.
    pub fn new(
        eqs: impl IntoIterator<Item = Poly>,
        neqs: impl IntoIterator<Item = Poly>,
    ) -> Option<Self> {
        let eqs: Vec<Poly> = eqs
            .into_iter()
            .filter(|p| !p.is_zero())
            .map(|p| normalize(&p))
            .collect();
        let neqs: Vec<Poly> = neqs.into_iter().map(|p| normalize(&p)).collect();
        if eqs.is_empty() && neqs.is_empty() {
            return None;
        }
        Some(canonical_covers(Descriptor {
            eqs: sorted_unique(eqs),
            neqs: sorted_unique(neqs),
        }))
    }

    pub fn eqs(&self) -> &[Poly] {
        &self.eqs
    }

    pub fn neqs(&self) -> &[Poly] {
        &self.neqs
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.eqs
            .iter()
            .chain(&self.neqs)
            .flat_map(|p| p.vars())
            .collect()
    }

    pub fn dim_ambient(&self) -> usize {
        self.vars().len()
    }

    pub fn cover_vars(&self) -> BTreeSet<Var> {
        self.vars().into_iter().filter(is_cover).collect()
    }

    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Option<Descriptor> {
        Descriptor::new(
            self.eqs.iter().map(|p| p.rename(&f)),
            self.neqs.iter().map(|p| p.rename(&f)),
        )
    }

    /// Negates every non-cover variable.
    pub fn negate_original(&self) -> Descriptor {
        let orig: BTreeSet<Var> = self.vars().into_iter().filter(|v| !is_cover(v)).collect();
        Descriptor::new(
            self.eqs.iter().map(|p| p.negate_vars(&orig)),
            self.neqs.iter().map(|p| p.negate_vars(&orig)),
        )
        .expect("negation keeps constraints")
    }

    /// Conjunction on disjoint variable blocks; clashing names of `other`
    /// are primed and its cover variables shifted.
    pub fn product(&self, other: &Descriptor) -> Descriptor {
        let mine = self.vars();
        let mut taken: BTreeSet<String> = mine
            .iter()
            .chain(other.vars().iter())
            .map(|v| v.to_string())
            .collect();
        let mut map = BTreeMap::new();
        for v in other.vars() {
            if is_cover(&v) {
                let mut k = taken.len();
                let mut name = format!("{COVER_PREFIX}p{k}");
                while taken.contains(&name) {
                    k += 1;
                    name = format!("{COVER_PREFIX}p{k}");
                }
                taken.insert(name.clone());
                map.insert(v, Var::new(&name));
            } else if mine.contains(&v) {
                let mut name = format!("{v}'");
                while taken.contains(&name) {
                    name.push('\'');
                }
                taken.insert(name.clone());
                map.insert(v, Var::new(&name));
            }
        }
        let rn = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        Descriptor::new(
            self.eqs
                .iter()
                .cloned()
                .chain(other.eqs.iter().map(|p| p.rename(rn))),
            self.neqs
                .iter()
                .cloned()
                .chain(other.neqs.iter().map(|p| p.rename(rn))),
        )
        .expect("product of nonempty descriptors")
    }

    /// Adds constraints, keeping the descriptor canonical.
    pub fn with(
        &self,
        eqs: impl IntoIterator<Item = Poly>,
        neqs: impl IntoIterator<Item = Poly>,
    ) -> Option<Descriptor> {
        Descriptor::new(
            self.eqs.iter().cloned().chain(eqs),
            self.neqs.iter().cloned().chain(neqs),
        )
    }

    /// The same system with all inequations removed.
    pub fn without_neqs(&self) -> Option<Descriptor> {
        Descriptor::new(self.eqs.iter().cloned(), std::iter::empty())
    }

    /// As a formula over its own variables (sorted by name).
    pub fn to_formula(&self) -> BasicFormula {
        BasicFormula::from_parts(
            self.vars().into_iter().collect(),
            self.eqs.iter().cloned(),
            self.neqs.iter().cloned(),
            std::iter::empty(),
        )
    }

    /// Inequality-free formulas become descriptors plus the number of free variables.
    pub fn from_formula(f: &BasicFormula) -> Option<(Option<Descriptor>, usize)> {
        if !f.pos().is_empty() || f.has_geq() {
            return None;
        }
        let d = Descriptor::new(f.eqs().iter().cloned(), f.neqs().iter().cloned());
        let used = d.as_ref().map_or(0, |d| d.dim_ambient());
        Some((d, f.nvars() - used))
    }
}

/// Renames cover variables to `_y1, _y2, ...` ordered by their defining equation.
fn canonical_covers(d: Descriptor) -> Descriptor {
    let covers: Vec<Var> = d.vars().into_iter().filter(is_cover).collect();
    if covers.is_empty() {
        return d;
    }
    let placeholder = Var::new(COVER_PREFIX);
    let mut keyed: Vec<(String, Var)> = covers
        .into_iter()
        .map(|y| {
            let key = d
                .eqs
                .iter()
                .chain(&d.neqs)
                .filter(|p| p.contains_var(&y))
                .map(|p| {
                    normalize(&p.rename(|v| {
                        if *v == y {
                            placeholder.clone()
                        } else {
                            v.clone()
                        }
                    }))
                    .to_string()
                })
                .collect::<Vec<_>>()
                .join(";");
            (key, y)
        })
        .collect();
    keyed.sort();
    let map: BTreeMap<Var, Var> = keyed
        .into_iter()
        .enumerate()
        .map(|(i, (_, y))| (y, Var::new(&format!("{COVER_PREFIX}{}", i + 1))))
        .collect();
    let rn = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    Descriptor {
        eqs: sorted_unique(d.eqs.iter().map(|p| normalize(&p.rename(rn))).collect()),
        neqs: sorted_unique(d.neqs.iter().map(|p| normalize(&p.rename(rn))).collect()),
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .eqs
            .iter()
            .map(|p| format!("{p} = 0"))
            .chain(self.neqs.iter().map(|p| format!("{p} != 0")))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    fn p(s: &str) -> Poly {
        parse_poly_free(s).unwrap()
    }

    #[test]
    fn cover_names_are_canonical() {
        let a = Descriptor::new([p("_ya^2 - x"), p("_yb^2 + x + 1")], []).unwrap();
        let b = Descriptor::new([p("_yq^2 + x + 1"), p("_yz^2 - x")], []).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cover_vars().len(), 2);
    }

    #[test]
    fn empty_system_is_affine_space() {
        assert!(Descriptor::new([Poly::zero()], []).is_none());
    }

    #[test]
    fn product_keeps_blocks_apart() {
        let a = Descriptor::new([p("x")], []).unwrap();
        let b = Descriptor::new([p("y")], []).unwrap();
        assert_eq!(
            a.product(&b),
            Descriptor::new([p("x"), p("y")], []).unwrap()
        );
        let aa = a.product(&a);
        assert_eq!(aa.dim_ambient(), 2);
    }
}
