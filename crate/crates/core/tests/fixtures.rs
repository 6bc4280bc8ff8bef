use std::path::PathBuf;

use bsa_core::arcs::{oracle_compare, Status};
use bsa_core::catalog::{ClassTable, Evaluator};
use bsa_core::zeta::{milnor_check, zeta_from_resolution, EpsilonSymbol, ResolutionData};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn table() -> ClassTable {
    ClassTable::load(&fixture("classes.table")).unwrap()
}

fn run(name: &str, n_max: usize) -> Vec<(EpsilonSymbol, bsa_core::arcs::OracleReport)> {
    let res = ResolutionData::load(&fixture(name)).unwrap();
    let fd = res.function.clone().unwrap();
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    EpsilonSymbol::ALL
        .iter()
        .map(|&e| {
            (
                e,
                oracle_compare(&fd.f, &fd.vars, &res, e, n_max, &ev, 3).unwrap(),
            )
        })
        .collect()
}

#[test]
fn table_is_consistent() {
    let t = table();
    assert_eq!(t.len(), 5);
    assert!(t.validate(3).is_empty(), "{:?}", t.validate(3));
}

#[test]
fn resolutions_agree_with_arcs() {
    for name in ["xy.res", "x2.res", "x2y2.res"] {
        for (e, r) in run(name, 6) {
            assert!(
                r.rows.iter().all(|row| row.status == Status::Match),
                "{name} eps={e}\n{r}"
            );
        }
    }
}

#[test]
fn corrupted_multiplicity_is_caught_at_two() {
    for (e, r) in run("xy_corrupt.res", 4) {
        if e == EpsilonSymbol::Naive || e == EpsilonSymbol::Plus || e == EpsilonSymbol::Gt {
            assert_eq!(r.first_mismatch(), Some(2), "eps={e}\n{r}");
        }
    }
}

#[test]
fn naive_is_gt_plus_lt() {
    for name in ["xy.res", "x2.res", "x2y2.res"] {
        let res = ResolutionData::load(&fixture(name)).unwrap();
        let z = |e| zeta_from_resolution(&res, e).unwrap().series(6);
        let (naive, gt, lt) = (
            z(EpsilonSymbol::Naive),
            z(EpsilonSymbol::Gt),
            z(EpsilonSymbol::Lt),
        );
        for n in 0..naive.len() {
            assert_eq!(naive[n], &gt[n] + &lt[n], "{name} n={}", n + 1);
        }
    }
}

#[test]
fn milnor_fibres_match_cells() {
    let t = table();
    let ev = Evaluator::new(Some(&t), Some(3));
    for name in ["xy.res", "x2.res", "x2y2.res"] {
        let res = ResolutionData::load(&fixture(name)).unwrap();
        for e in [
            EpsilonSymbol::Plus,
            EpsilonSymbol::Minus,
            EpsilonSymbol::Gt,
            EpsilonSymbol::Lt,
        ] {
            let c = milnor_check(&res, e, &ev, 3).unwrap();
            assert!(c.closed.is_some() && c.open.is_some());
            assert!(c.disagreements().is_empty(), "{name} eps={e}: {c:?}");
        }
    }
}
