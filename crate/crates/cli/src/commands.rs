use std::path::Path;

use bsa_core::arcs::{oracle_compare, zeta_coefficient_direct, DirectCoefficient, Status};
use bsa_core::cad::{euler_compact_with, Cad, CadOptions};
use bsa_core::catalog::{
    beta_class, beta_formula, reduce_class, ClassTable, Evaluator, VirtualPoly,
};
use bsa_core::formula::{parse_formula, parse_poly, parse_poly_free};
use bsa_core::k0::{chi_closed_form, chi_inductive, eliminate_neq, ClassExpr};
use bsa_core::poly::{Poly, Var};
use bsa_core::zeta::{
    euler_of_class, milnor_check, milnor_fibre, series_expand, zeta_from_resolution, EpsilonSymbol,
    ResolutionData,
};

use crate::error::CliError;
use crate::report::{Report, Table};
use crate::Options;

pub type Outcome = Result<(Report, Option<CliError>), CliError>;

fn load_table(opts: &Options) -> Result<Option<ClassTable>, CliError> {
    let Some(path) = &opts.table else {
        return Ok(None);
    };
    let t = ClassTable::load(path)?;
    let issues = t.validate(opts.cad_cap);
    if !issues.is_empty() {
        let lines: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
        return Err(CliError::Validation(format!(
            "class table:\n  {}",
            lines.join("\n  ")
        )));
    }
    Ok(Some(t))
}

fn cad_options(opts: &Options) -> CadOptions {
    CadOptions {
        cap: opts.cad_cap,
        order: opts
            .var_order
            .as_ref()
            .map(|vs| vs.iter().map(|v| Var::new(v)).collect()),
    }
}

fn parse_eps(text: &str) -> Result<EpsilonSymbol, CliError> {
    text.parse().map_err(|_| {
        CliError::Parse(format!(
            "unknown epsilon `{text}`; use naive, 1, -1, gt or lt"
        ))
    })
}

fn load_resolution(path: &Path) -> Result<ResolutionData, CliError> {
    let res = ResolutionData::load(path)?;
    res.validate()?;
    Ok(res)
}

fn beta_text(c: &ClassExpr, ev: &Evaluator) -> String {
    beta_class(c, ev).map_or_else(|_| "-".to_string(), |v| v.fraction_string())
}

pub fn measure(formula: &str) -> Outcome {
    let f = parse_formula(formula)?;
    let closed = chi_closed_form(&f);
    let inductive = chi_inductive(&f);
    let agree = eliminate_neq(&closed) == eliminate_neq(&inductive);
    let ev = Evaluator::default();
    let mut r = Report::default();
    r.field("formula", &f)
        .field("chi", reduce_class(&closed, &ev))
        .field("closed_form", &closed)
        .field("inductive", &inductive)
        .field("agree", agree);
    let failure = (!agree)
        .then(|| CliError::Invariant("closed form and inductive elimination differ".into()));
    Ok((r, failure))
}

pub fn beta(formula: &str, opts: &Options) -> Outcome {
    let f = parse_formula(formula)?;
    let table = load_table(opts)?;
    let ev = Evaluator::new(table.as_ref(), Some(opts.cad_cap));
    let v = beta_formula(&f, &ev)?;
    let at = v.at_minus_one();
    let mut r = Report::default();
    r.field("formula", &f)
        .field("beta", v.fraction_string())
        .field("beta(-1)", &at);
    let mut failure = None;
    if f.nvars() <= opts.cad_cap {
        let chi = euler_compact_with(&f, &cad_options(opts))?;
        r.field("chi_c", chi);
        if at.to_i64() != Some(chi) {
            failure = Some(CliError::Invariant(format!(
                "beta(-1) = {at} but the cells give {chi}"
            )));
        }
    } else {
        r.field("chi_c", "skipped (over the cell cap)");
    }
    Ok((r, failure))
}

pub fn euler(formula: &str, cells: bool, opts: &Options) -> Outcome {
    let f = parse_formula(formula)?;
    let copts = cad_options(opts);
    let chi = euler_compact_with(&f, &copts)?;
    let mut r = Report::default();
    r.field("formula", &f).field("chi_c", chi);
    if cells {
        let vars: Vec<Var> = copts.order.clone().unwrap_or_else(|| f.vars().to_vec());
        let polys: Vec<Poly> = f.polys().filter(|p| !p.is_constant()).cloned().collect();
        let cad = Cad::new(&polys, &vars, opts.cad_cap)?;
        let rows = cad
            .cells()
            .iter()
            .enumerate()
            .map(|(i, c)| vec![i.to_string(), c.to_string()])
            .collect();
        r.table(Table {
            name: "cell".into(),
            header: vec!["#".into(), "cell".into()],
            rows,
        });
    }
    Ok((r, None))
}

pub fn zeta(path: &Path, eps: &str, order: usize, opts: &Options) -> Outcome {
    let eps = parse_eps(eps)?;
    let res = load_resolution(path)?;
    let table = load_table(opts)?;
    let ev = Evaluator::new(table.as_ref(), Some(opts.cad_cap));
    let z = zeta_from_resolution(&res, eps)?;
    let mut r = Report::default();
    r.field("eps", eps).field("zeta", &z);
    let mut rows = Vec::new();
    for (k, c) in series_expand(&z, order).iter().enumerate() {
        let chi = euler_of_class(c, &ev, opts.cad_cap)
            .map_or_else(|e| format!("- ({e})"), |x| x.to_string());
        rows.push(vec![
            (k + 1).to_string(),
            reduce_class(c, &ev).to_string(),
            beta_text(c, &ev),
            chi,
        ]);
    }
    r.table(Table {
        name: "coeff".into(),
        header: vec!["n".into(), "class".into(), "beta".into(), "chi_c".into()],
        rows,
    });
    Ok((r, None))
}

pub fn milnor(path: &Path, eps: &str, opts: &Options) -> Outcome {
    let eps = parse_eps(eps)?;
    let res = load_resolution(path)?;
    let table = load_table(opts)?;
    let ev = Evaluator::new(table.as_ref(), Some(opts.cad_cap));
    let s = milnor_fibre(&res, eps)?;
    let check = milnor_check(&res, eps, &ev, opts.cad_cap)?;
    let mut r = Report::default();
    r.field("eps", eps)
        .field("S", reduce_class(&s, &ev))
        .field("beta(S)", beta_text(&s, &ev))
        .field("chi_c(S)", check.chi);
    if let Some(v) = check.closed {
        r.field("chi_c(closed fibre)", v);
    }
    if let Some(v) = check.open {
        r.field("(-1)^(d+1) chi_c(open fibre)", v);
    }
    if let Some(v) = check.boundary {
        r.field("-chi_c(G)", v);
    }
    let bad: Vec<String> = check
        .disagreements()
        .iter()
        .map(|(name, v)| format!("{name} gives {v}"))
        .collect();
    let failure = (!bad.is_empty())
        .then(|| CliError::Invariant(format!("chi_c(S) = {} but {}", check.chi, bad.join(", "))));
    Ok((r, failure))
}

pub fn arc_coeff(
    f: &str,
    vars: Option<&[String]>,
    n_max: usize,
    eps: &str,
    resolution: Option<&Path>,
    opts: &Options,
) -> Outcome {
    let eps = parse_eps(eps)?;
    let (poly, vars) = match vars {
        Some(vs) => {
            let names: Vec<&str> = vs.iter().map(String::as_str).collect();
            (
                parse_poly(f, &names)?,
                vs.iter().map(|v| Var::new(v)).collect::<Vec<_>>(),
            )
        }
        None => {
            let p = parse_poly_free(f)?;
            let vs = p.vars().into_iter().collect();
            (p, vs)
        }
    };
    let table = load_table(opts)?;
    let ev = Evaluator::new(table.as_ref(), Some(opts.cad_cap));
    let mut r = Report::default();
    r.field("f", &poly).field("eps", eps);
    if let Some(path) = resolution {
        let res = load_resolution(path)?;
        let report = oracle_compare(&poly, &vars, &res, eps, n_max, &ev, opts.cad_cap)?;
        let rows = report
            .rows
            .iter()
            .map(|row| {
                let series = row
                    .series_beta
                    .as_ref()
                    .map_or_else(|| row.series.to_string(), |v| v.fraction_string());
                let direct = match (&row.direct_beta, &row.direct) {
                    (Some(v), _) => v.fraction_string(),
                    (None, Some(d)) => d.to_string(),
                    (None, None) => "-".into(),
                };
                let status = match &row.status {
                    Status::Match => "match".to_string(),
                    Status::EulerMatch => "match (chi_c)".to_string(),
                    Status::Mismatch => "MISMATCH".to_string(),
                    Status::Unavailable(w) => format!("unavailable: {w}"),
                };
                vec![row.n.to_string(), series, direct, status]
            })
            .collect();
        r.table(Table {
            name: "n".into(),
            header: vec![
                "n".into(),
                "series".into(),
                "direct".into(),
                "status".into(),
            ],
            rows,
        });
        let failure = report
            .first_mismatch()
            .map(|n| CliError::Invariant(format!("series and arcs disagree first at n = {n}")));
        return Ok((r, failure));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let row = match zeta_coefficient_direct(&poly, &vars, n, eps, &ev, opts.cad_cap) {
            Ok(DirectCoefficient::Class(c)) => {
                let chi = euler_of_class(&c, &ev, opts.cad_cap)
                    .map_or_else(|_| "-".to_string(), |x| x.to_string());
                let class = beta_class(&c, &ev)
                    .map_or_else(|_| c.to_string(), |v| v.to_class().to_string());
                vec![n.to_string(), class, chi, "exact".into()]
            }
            Ok(DirectCoefficient::Euler(x)) => vec![
                n.to_string(),
                "-".into(),
                x.to_string(),
                "chi_c only".into(),
            ],
            Err(e) => vec![
                n.to_string(),
                "-".into(),
                "-".into(),
                format!("unavailable: {e}"),
            ],
        };
        rows.push(row);
    }
    r.table(Table {
        name: "n".into(),
        header: vec!["n".into(), "class".into(), "chi_c".into(), "status".into()],
        rows,
    });
    Ok((r, None))
}

struct Check {
    name: &'static str,
    got: String,
    want: String,
}

const XY_RESOLUTION: &str = include_str!("../../../fixtures/xy.res");
const FIBRE_TABLE: &str = include_str!("../../../fixtures/classes.table");

fn chi_of(text: &str, ev: &Evaluator) -> Result<String, CliError> {
    Ok(reduce_class(&chi_closed_form(&parse_formula(text)?), ev).to_string())
}

fn beta_of(text: &str, ev: &Evaluator) -> Result<String, CliError> {
    Ok(beta_formula(&parse_formula(text)?, ev)?.fraction_string())
}

fn l_class(text: &str) -> String {
    bsa_core::zeta::parse_l_class(text)
        .expect("literal")
        .to_string()
}

fn reference_checks() -> Result<Vec<Check>, CliError> {
    let table = ClassTable::parse(FIBRE_TABLE)?;
    let ev = Evaluator::new(Some(&table), Some(3));
    let res: ResolutionData = XY_RESOLUTION.parse()?;
    let mut out = Vec::new();
    let mut chi = |name, f, want: &str| -> Result<(), CliError> {
        out.push(Check {
            name,
            got: chi_of(f, &ev)?,
            want: l_class(want),
        });
        Ok(())
    };
    chi("chi [x > 0]", "vars x; x > 0", "1/2*L - 1/2")?;
    chi(
        "chi [x1 > 0] in 2 variables",
        "vars x1, x2; x1 > 0",
        "1/2*L^2 - 1/2*L",
    )?;
    chi(
        "chi [x1 > 0, x2 > 0]",
        "vars x1, x2; x1 > 0, x2 > 0",
        "1/4*L^2 - 1/2*L + 1/4",
    )?;
    chi("chi [x^2 + 1 > 0]", "vars x; x^2 + 1 > 0", "3/4*L - 1/4")?;
    chi("chi [x^2 + 1 < 0]", "vars x; x^2 + 1 < 0", "1/4*L + 1/4")?;
    chi(
        "chi [1 + x^2 > 0, -(1 + x^2) > 0]",
        "vars x; 1 + x^2 > 0, -(1 + x^2) > 0",
        "1/8*L + 1/8",
    )?;
    let mut beta = |name, f, want: &str| -> Result<(), CliError> {
        out.push(Check {
            name,
            got: beta_of(f, &ev)?,
            want: want.to_string(),
        });
        Ok(())
    };
    beta(
        "beta [x > 0, x > -1]",
        "vars x; x > 0, x + 1 > 0",
        "(5*u - 11)/16",
    )?;
    beta(
        "beta open unit disc",
        "vars x1, x2; 1 - x1^2 - x2^2 > 0",
        "(2*u^2 - 3*u - 1)/4",
    )?;
    beta(
        "beta {xy = c, 1 - x^2 - y^2 > 0}",
        "vars x, y; x*y = 1/4, 1 - x^2 - y^2 > 0",
        "(u - 3)/2",
    )?;
    beta(
        "beta {xy = c, 1 - x^2 - y^2 >= 0}",
        "vars x, y; x*y = 1/4, 1 - x^2 - y^2 >= 0",
        "(u + 5)/2",
    )?;
    let z = zeta_from_resolution(&res, EpsilonSymbol::Plus)?;
    let got: Vec<String> = series_expand(&z, 6)
        .iter()
        .map(|c| beta_text(c, &ev))
        .collect();
    let want: Vec<String> = (1..=6i64)
        .map(|n| {
            let k = VirtualPoly::int(n - 1);
            (&k * &(&VirtualPoly::u_pow(1 - n) - &VirtualPoly::u_pow(-n))).fraction_string()
        })
        .collect();
    out.push(Check {
        name: "Z_xy^1 series to order 6",
        got: got.join(", "),
        want: want.join(", "),
    });
    let s = milnor_fibre(&res, EpsilonSymbol::Plus)?;
    out.push(Check {
        name: "S_xy^1",
        got: reduce_class(&s, &ev).to_string(),
        want: l_class("1 - L"),
    });
    out.push(Check {
        name: "beta(S_xy^1)",
        got: beta_text(&s, &ev),
        want: "-u + 1".into(),
    });
    out.push(Check {
        name: "chi_c(S_xy^1)",
        got: euler_of_class(&s, &ev, 3)?.to_string(),
        want: "2".into(),
    });
    Ok(out)
}

pub fn selftest(_opts: &Options) -> Outcome {
    let checks = reference_checks()?;
    let mut r = Report::default();
    let mut failed = 0;
    let rows = checks
        .iter()
        .map(|c| {
            let ok = c.got == c.want;
            if !ok {
                failed += 1;
            }
            let detail = if ok {
                c.got.clone()
            } else {
                format!("got {}, want {}", c.got, c.want)
            };
            vec![
                c.name.to_string(),
                if ok { "ok" } else { "FAIL" }.to_string(),
                detail,
            ]
        })
        .collect();
    r.field("checks", checks.len()).field("failed", failed);
    r.table(Table {
        name: "check".into(),
        header: vec!["check".into(), "result".into(), "value".into()],
        rows,
    });
    let failure =
        (failed > 0).then(|| CliError::Invariant(format!("{failed} reference value(s) differ")));
    Ok((r, failure))
}
