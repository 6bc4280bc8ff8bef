mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use bsa_core::arcs::{oracle_compare, Status};
use bsa_core::cad::euler_compact;
use bsa_core::catalog::{
    beta_formula, double_cover_beta, half_line, homogeneous_beta, reduce_class, ClassTable,
    Evaluator, HomogeneousMode, VirtualPoly,
};
use bsa_core::formula::{
    parse_formula, parse_poly_free, product_formula, BasicFormula, RenameMode,
};
use bsa_core::k0::{chi_closed_form, chi_inductive, eliminate_neq, ClassExpr};
use bsa_core::poly::{rat, Dyadic, Poly, Var};
use bsa_core::zeta::{
    euler_of_class, milnor_check, milnor_fibre, parse_l_class, zeta_from_resolution, EpsilonSymbol,
    ResolutionData,
};
use common::{catalog_formula, config, fixture, formula, nonconstant, var_names};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const FIXTURES: [&str; 3] = ["xy.res", "x2.res", "x2y2.res"];

fn table() -> ClassTable {
    ClassTable::load(&fixture("classes.table")).unwrap()
}

fn resolution(name: &str) -> ResolutionData {
    ResolutionData::load(&fixture(name)).unwrap()
}

fn chi(f: &BasicFormula) -> ClassExpr {
    eliminate_neq(&chi_closed_form(f))
}

fn expect(failures: &mut Vec<String>, what: &str, got: String, want: String) {
    if got != want {
        failures.push(format!("{what}: got {got}, want {want}"));
    }
}

fn verdict(checked: usize, failures: Vec<String>) -> Verdict {
    if failures.is_empty() {
        Ok(format!("{checked} checks"))
    } else {
        Err(failures.join("; "))
    }
}

fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Verdict {
    let mut runner = TestRunner::new(config(cases));
    runner
        .run(&strategy, test)
        .map(|_| format!("{cases} cases"))
        .map_err(|e| e.to_string())
}

fn reference_values() -> Verdict {
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    let mut bad = Vec::new();
    let chis = [
        ("vars x; x > 0", "1/2*L - 1/2"),
        ("vars x1, x2; x1 > 0", "1/2*L^2 - 1/2*L"),
        ("vars x1, x2; x1 > 0, x2 > 0", "1/4*L^2 - 1/2*L + 1/4"),
        ("vars x; x^2 + 1 > 0", "3/4*L - 1/4"),
        ("vars x; x^2 + 1 < 0", "1/4*L + 1/4"),
        ("vars x; 1 + x^2 > 0, -(1 + x^2) > 0", "1/8*L + 1/8"),
    ];
    for (f, want) in chis {
        let got = reduce_class(&chi_closed_form(&parse_formula(f).unwrap()), &ev).to_string();
        expect(&mut bad, f, got, parse_l_class(want).unwrap().to_string());
    }
    let betas = [
        ("vars x; x > 0, x + 1 > 0", "(5*u - 11)/16"),
        ("vars x1, x2; 1 - x1^2 - x2^2 > 0", "(2*u^2 - 3*u - 1)/4"),
        ("vars x, y; x*y = 1/4, 1 - x^2 - y^2 > 0", "(u - 3)/2"),
        ("vars x, y; x*y = 1/4, 1 - x^2 - y^2 >= 0", "(u + 5)/2"),
    ];
    for (f, want) in betas {
        let got = beta_formula(&parse_formula(f).unwrap(), &ev)
            .map_or_else(|e| e.to_string(), |v| v.fraction_string());
        expect(&mut bad, f, got, want.to_string());
    }
    let res = resolution("xy.res");
    let series = zeta_from_resolution(&res, EpsilonSymbol::Plus)
        .unwrap()
        .series(6);
    for (i, c) in series.iter().enumerate() {
        let n = i as i64 + 1;
        // (L - 1)/(L T^-1 - 1)^2 = sum (n - 1)(L - 1) L^-n T^n
        let want = (&VirtualPoly::u() - &VirtualPoly::one())
            .shift(-n)
            .scale(&Dyadic::from_int(n - 1));
        let got = VirtualPoly::from_class(&reduce_class(c, &ev)).map(|v| v.to_string());
        expect(
            &mut bad,
            &format!("Z coefficient {n}"),
            format!("{got:?}"),
            format!("{:?}", Some(want.to_string())),
        );
    }
    let s = milnor_fibre(&res, EpsilonSymbol::Plus).unwrap();
    expect(
        &mut bad,
        "S",
        reduce_class(&s, &ev).to_string(),
        parse_l_class("1 - L").unwrap().to_string(),
    );
    let beta_s = bsa_core::catalog::beta_class(&s, &ev).map(|v| v.to_string());
    expect(
        &mut bad,
        "beta(S)",
        format!("{beta_s:?}"),
        format!("{:?}", Ok::<_, ()>("-u + 1".to_string())),
    );
    expect(
        &mut bad,
        "chi_c(S)",
        format!("{:?}", euler_of_class(&s, &ev, 3)),
        "Ok(2)".into(),
    );
    verdict(chis.len() + betas.len() + series.len() + 3, bad)
}

fn closed_form_is_inductive() -> Verdict {
    run_cases(500, formula(2, 3, 3), |f| {
        prop_assert_eq!(chi(&f), eliminate_neq(&chi_inductive(&f)), "{}", f);
        Ok(())
    })
}

fn ring_laws() -> Verdict {
    let semi = run_cases(
        500,
        (formula(2, 2, 3), nonconstant(var_names(2), 3, 3)),
        |(f, r)| {
            let pos = chi(&f.clone().with_pos(r.clone()));
            let neg = chi(&f.clone().with_pos(-&r));
            prop_assert_eq!(&pos + &neg, chi(&f.clone().with_neq(r)));
            Ok(())
        },
    );
    let alg = run_cases(
        500,
        (formula(2, 2, 3), nonconstant(var_names(2), 3, 3)),
        |(f, s)| {
            let split = &chi(&f.clone().with_eq(s.clone())) + &chi(&f.clone().with_neq(s));
            prop_assert_eq!(split, chi(&f));
            Ok(())
        },
    );
    let prod = run_cases(500, (formula(1, 2, 3), formula(2, 1, 2)), |(a, b)| {
        let b = b.rename(|v| Var::new(&format!("{v}2")));
        let ab = product_formula(&a, &b, RenameMode::Forbid).unwrap();
        prop_assert_eq!(chi(&ab), &chi(&a) * &chi(&b));
        Ok(())
    });
    match (semi, alg, prod) {
        (Ok(_), Ok(_), Ok(_)) => Ok("500 cases per law".into()),
        (s, a, p) => Err(format!(
            "semialgebraic {s:?}, algebraic {a:?}, product {p:?}"
        )),
    }
}

fn beta_matches_cells() -> Verdict {
    let ev = Evaluator::bare();
    let mut runner = TestRunner::new(config(1));
    let strategy = catalog_formula();
    let (mut supported, mut drawn) = (0, 0);
    while supported < 100 && drawn < 5000 {
        drawn += 1;
        let f = strategy.new_tree(&mut runner).unwrap().current();
        let Ok(b) = beta_formula(&f, &ev) else {
            continue;
        };
        supported += 1;
        let cells = euler_compact(&f).map_err(|e| format!("{f}: {e}"))?;
        if b.at_minus_one() != Dyadic::from_int(cells) {
            return Err(format!("{f}: beta = {b}, cells give {cells}"));
        }
    }
    if supported < 100 {
        return Err(format!("only {supported} of {drawn} formulas supported"));
    }
    Ok(format!("{supported} supported of {drawn} drawn"))
}

fn homogeneous_suite() -> Verdict {
    let ev = Evaluator::default();
    let mut bad = Vec::new();
    let run = |s: &str, mode| {
        let r = parse_poly_free(s).unwrap();
        let vars: Vec<Var> = r.vars().into_iter().collect();
        homogeneous_beta(&r, &vars, mode, &ev)
            .map(|v| v.to_string())
            .map_err(|e| e.to_string())
    };
    let direct = |s: &str| {
        let f = parse_formula(s).unwrap();
        beta_formula(&f, &ev)
            .map(|v| v.to_string())
            .map_err(|e| e.to_string())
    };
    let three_halves =
        (&half_line() * &VirtualPoly::parse("u + 1").unwrap()).scale(&Dyadic::new(3, 1));
    let cases = [
        (
            "R1",
            run("x1^2 + x2^2", HomogeneousMode::TwiceOdd),
            Ok(three_halves.to_string()),
        ),
        (
            "R1 direct",
            direct("vars x1, x2; x1^2 + x2^2 > 0"),
            Ok(three_halves.to_string()),
        ),
        (
            "R2",
            run("x1^2 - x2^2", HomogeneousMode::TwiceOdd),
            Ok((&half_line() * &VirtualPoly::parse("u - 1").unwrap()).to_string()),
        ),
        (
            "R2 direct",
            direct("vars x1, x2; x1^2 - x2^2 > 0"),
            run("x1^2 - x2^2", HomogeneousMode::TwiceOdd),
        ),
        (
            "odd x",
            run("x", HomogeneousMode::Odd),
            Ok(half_line().to_string()),
        ),
        (
            "odd x*y^2",
            run("x*y^2", HomogeneousMode::Odd),
            direct("vars x, y; x*y^2 > 0"),
        ),
        (
            "square x^2",
            run("x^2", HomogeneousMode::SquareOfOdd),
            direct("vars x; x^2 > 0"),
        ),
        (
            "square (x - y)^2",
            run("x^2 - 2*x*y + y^2", HomogeneousMode::SquareOfOdd),
            direct("vars x, y; x^2 - 2*x*y + y^2 > 0"),
        ),
    ];
    let n_cases = cases.len();
    for (name, got, want) in cases {
        expect(&mut bad, name, format!("{got:?}"), format!("{want:?}"));
    }
    for (r, want) in [
        ("x1^2 + x2^2", "vars x1, x2, y; y^2 - x1^2 - x2^2 = 0"),
        ("x1^2 - x2^2", "vars x1, x2, y; y^2 - x1^2 + x2^2 = 0"),
    ] {
        let p = parse_poly_free(r).unwrap();
        let vars: Vec<Var> = p.vars().into_iter().collect();
        let cover = double_cover_beta(&p, &vars, &ev)
            .map(|v| v.to_string())
            .map_err(|e| e.to_string());
        expect(
            &mut bad,
            &format!("Y^2 = {r}"),
            format!("{cover:?}"),
            format!("{:?}", direct(want)),
        );
    }
    let mut runner = TestRunner::new(config(1));
    let coeffs = proptest::collection::vec(-3i64..=3, 4);
    let (x, y) = (Poly::var(Var::new("x")), Poly::var(Var::new("y")));
    let vs = var_names(2);
    let mut random = 0;
    for i in 0..200 {
        if random >= 40 {
            break;
        }
        let c = coeffs.new_tree(&mut runner).unwrap().current();
        let (r, mode) = match i % 3 {
            0 => (
                &(&x.pow(2).scale(&rat(c[0])) + &(&x * &y).scale(&rat(c[1])))
                    + &y.pow(2).scale(&rat(c[2])),
                HomogeneousMode::TwiceOdd,
            ),
            1 => (
                &(&(&x.pow(3).scale(&rat(c[0])) + &(&x.pow(2) * &y).scale(&rat(c[1])))
                    + &(&x * &y.pow(2)).scale(&rat(c[2])))
                    + &y.pow(3).scale(&rat(c[3])),
                HomogeneousMode::Odd,
            ),
            _ => (
                (&x.scale(&rat(c[0])) + &y.scale(&rat(c[1]))).pow(2),
                HomogeneousMode::SquareOfOdd,
            ),
        };
        if r.is_zero() {
            continue;
        }
        let Ok(h) = homogeneous_beta(&r, &vs, mode, &ev) else {
            continue;
        };
        random += 1;
        let cells = euler_compact(&BasicFormula::new(vs.clone()).with_pos(r.clone()))
            .map_err(|e| e.to_string())?;
        if h.at_minus_one() != Dyadic::from_int(cells) {
            bad.push(format!("{r} ({mode}): beta = {h}, cells give {cells}"));
        }
    }
    if random < 20 {
        bad.push(format!(
            "only {random} random homogeneous polynomials supported"
        ));
    }
    verdict(n_cases + 2 + random, bad)
}

fn zeta_matches_arcs() -> Verdict {
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    let mut rows = 0;
    let mut bad = Vec::new();
    for name in FIXTURES {
        let res = resolution(name);
        let fd = res.function.clone().unwrap();
        for e in EpsilonSymbol::ALL {
            let report = oracle_compare(&fd.f, &fd.vars, &res, e, 6, &ev, 3)
                .map_err(|err| format!("{name} {e}: {err}"))?;
            rows += report.rows.len();
            if report.rows.len() != 6 {
                bad.push(format!("{name} {e}: {} rows", report.rows.len()));
            }
            for row in &report.rows {
                if row.status != Status::Match && row.status != Status::EulerMatch {
                    bad.push(format!("{name} {e} n={}: {:?}", row.n, row.status));
                }
            }
        }
    }
    verdict(rows, bad)
}

fn milnor_fibres() -> Verdict {
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    let mut checked = 0;
    let mut bad = Vec::new();
    for name in FIXTURES {
        let res = resolution(name);
        for e in [
            EpsilonSymbol::Plus,
            EpsilonSymbol::Minus,
            EpsilonSymbol::Gt,
            EpsilonSymbol::Lt,
        ] {
            let c = milnor_check(&res, e, &ev, 3).map_err(|err| format!("{name} {e}: {err}"))?;
            let signed = matches!(e, EpsilonSymbol::Gt | EpsilonSymbol::Lt);
            if c.closed.is_none() || c.open.is_none() || c.boundary.is_some() != signed {
                bad.push(format!("{name} {e}: missing fibre"));
            }
            checked += 1;
            for (what, v) in c.disagreements() {
                bad.push(format!(
                    "{name} {e}: chi_c(S) = {}, {what} gives {v}",
                    c.chi
                ));
            }
        }
    }
    let xy = parse_formula("vars x, y; x*y = 1/2, x^2 + y^2 <= 1").unwrap();
    expect(
        &mut bad,
        "{xy = 1/2, x^2 + y^2 <= 1}",
        format!("{:?}", euler_compact(&xy)),
        "Ok(2)".into(),
    );
    verdict(checked + 1, bad)
}

fn corrupted_resolution() -> Verdict {
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    let res = resolution("xy_corrupt.res");
    let fd = res.function.clone().unwrap();
    let r = oracle_compare(&fd.f, &fd.vars, &res, EpsilonSymbol::Plus, 4, &ev, 3)
        .map_err(|e| e.to_string())?;
    match r.first_mismatch() {
        Some(2) => Ok("first mismatch at n = 2".into()),
        other => Err(format!("first mismatch {other:?}")),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reference values", reference_values),
        (
            "closed form equals inductive form",
            closed_form_is_inductive,
        ),
        ("ring laws", ring_laws),
        (
            "beta at -1 equals cell Euler characteristic",
            beta_matches_cells,
        ),
        ("homogeneous polynomials", homogeneous_suite),
        ("zeta series equals arc coefficients", zeta_matches_arcs),
        ("Milnor fibres", milnor_fibres),
        ("corrupted resolution is flagged", corrupted_resolution),
    ];
    let worker = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let mut failed = 0;
            for (i, (name, check)) in criteria.iter().enumerate() {
                let v = catch_unwind(AssertUnwindSafe(check))
                    .unwrap_or_else(|_| Err("panicked".into()));
                match v {
                    Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
                    Err(detail) => {
                        failed += 1;
                        println!("criterion {}: FAIL {name}: {detail}", i + 1);
                    }
                }
            }
            failed
        });
    match worker.unwrap().join() {
        Ok(0) => ExitCode::SUCCESS,
        _ => ExitCode::FAILURE,
    }
}
