use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{Evaluator, Unsupported, VirtualPoly};
use crate::poly::{Dyadic, Poly, Var};

/// Which identity expresses `[R > 0]` through level sets of `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneousMode {
    /// `deg R` odd.
    Odd,
    /// `R = P^2` with `deg P` odd.
    SquareOfOdd,
    /// `deg R = 2k` with `k` odd.
    TwiceOdd,
}

impl FromStr for HomogeneousMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "odd" => Ok(HomogeneousMode::Odd),
            "square" => Ok(HomogeneousMode::SquareOfOdd),
            "even" => Ok(HomogeneousMode::TwiceOdd),
            _ => Err(format!("unknown mode `{s}` (expected odd, square or even)")),
        }
    }
}

impl fmt::Display for HomogeneousMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HomogeneousMode::Odd => "odd",
            HomogeneousMode::SquareOfOdd => "square",
            HomogeneousMode::TwiceOdd => "even",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomogeneousError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree {degree} does not fit mode {mode}")]
    ParityMismatch { degree: u32, mode: HomogeneousMode },
    #[error("variable `{0}` is not in the ambient space")]
    Ambient(String),
    #[error(transparent)]
    Unsupported(#[from] Unsupported),
}

/// `beta([X > 0]) = (u - 1) / 2`.
pub fn half_line() -> VirtualPoly {
    (&VirtualPoly::u() - &VirtualPoly::one()).scale(&Dyadic::inv_pow2(1))
}

fn level(
    ev: &Evaluator,
    amb: &BTreeSet<Var>,
    r: &Poly,
    c: i64,
) -> Result<VirtualPoly, Unsupported> {
    ev.eval_in(amb, &[r - &Poly::int(c)])
}

fn check(r: &Poly, vars: &[Var]) -> Result<(BTreeSet<Var>, u32), HomogeneousError> {
    let d = r
        .homogeneous_degree()
        .filter(|d| *d > 0)
        .ok_or(HomogeneousError::NotHomogeneous)?;
    let amb: BTreeSet<Var> = vars.iter().cloned().collect();
    if let Some(v) = r.vars().into_iter().find(|v| !amb.contains(v)) {
        return Err(HomogeneousError::Ambient(v.name().to_string()));
    }
    Ok((amb, d))
}

/// `beta([R > 0])` in the affine space on `vars`, from level sets of `R`.
pub fn homogeneous_beta(
    r: &Poly,
    vars: &[Var],
    mode: HomogeneousMode,
    ev: &Evaluator,
) -> Result<VirtualPoly, HomogeneousError> {
    let (amb, d) = check(r, vars)?;
    let mismatch = HomogeneousError::ParityMismatch { degree: d, mode };
    match mode {
        HomogeneousMode::Odd => {
            if d % 2 == 0 {
                return Err(mismatch);
            }
            Ok(&half_line() * &level(ev, &amb, r, 1)?)
        }
        HomogeneousMode::SquareOfOdd => {
            let p = r.sqrt_exact().ok_or(mismatch.clone())?;
            if p.total_degree() % 2 == 0 {
                return Err(mismatch);
            }
            Ok(&half_line() * &level(ev, &amb, r, 1)?)
        }
        HomogeneousMode::TwiceOdd => {
            if d % 4 != 2 {
                return Err(mismatch);
            }
            let plus = level(ev, &amb, r, 1)?;
            let minus = level(ev, &amb, r, -1)?;
            let nonzero = &VirtualPoly::u_pow(amb.len() as i64) - &level(ev, &amb, r, 0)?;
            let quarter = (&VirtualPoly::u() - &VirtualPoly::one()).scale(&Dyadic::inv_pow2(2));
            Ok(&(&quarter * &(&plus - &minus)) + &nonzero.scale(&Dyadic::inv_pow2(1)))
        }
    }
}

/// `beta([Y^2 = R]) = beta([R = 0]) + (u - 1) beta([R = 1])` for `deg R = 2k`, `k` odd.
pub fn double_cover_beta(
    r: &Poly,
    vars: &[Var],
    ev: &Evaluator,
) -> Result<VirtualPoly, HomogeneousError> {
    let (amb, d) = check(r, vars)?;
    if d % 4 != 2 {
        return Err(HomogeneousError::ParityMismatch {
            degree: d,
            mode: HomogeneousMode::TwiceOdd,
        });
    }
    let torus = &VirtualPoly::u() - &VirtualPoly::one();
    Ok(&level(ev, &amb, r, 0)? + &(&torus * &level(ev, &amb, r, 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    fn run(s: &str, mode: HomogeneousMode) -> Result<VirtualPoly, HomogeneousError> {
        let r = parse_poly_free(s).unwrap();
        let vars: Vec<Var> = r.vars().into_iter().collect();
        homogeneous_beta(&r, &vars, mode, &Evaluator::default())
    }

    #[test]
    fn two_variable_quadrics() {
        let r1 = run("x1^2 + x2^2", HomogeneousMode::TwiceOdd).unwrap();
        let three_halves = &half_line() * &VirtualPoly::parse("u + 1").unwrap();
        assert_eq!(r1, three_halves.scale(&Dyadic::new(3, 1)));
        let r2 = run("x1^2 - x2^2", HomogeneousMode::TwiceOdd).unwrap();
        assert_eq!(r2, &half_line() * &VirtualPoly::parse("u - 1").unwrap());
    }

    #[test]
    fn odd_and_square() {
        assert_eq!(run("x", HomogeneousMode::Odd).unwrap(), half_line());
        assert_eq!(
            run("x^2", HomogeneousMode::SquareOfOdd)
                .unwrap()
                .to_string(),
            "u - 1"
        );
    }

    #[test]
    fn rejects_wrong_inputs() {
        assert_eq!(
            run("x + 1", HomogeneousMode::Odd),
            Err(HomogeneousError::NotHomogeneous)
        );
        assert!(matches!(
            run("x*y", HomogeneousMode::Odd),
            Err(HomogeneousError::ParityMismatch { .. })
        ));
        assert!(matches!(
            run("x^4", HomogeneousMode::TwiceOdd),
            Err(HomogeneousError::ParityMismatch { .. })
        ));
        assert!(matches!(
            run("x*y", HomogeneousMode::SquareOfOdd),
            Err(HomogeneousError::ParityMismatch { .. })
        ));
    }

    #[test]
    fn double_cover_of_a_cone() {
        let r = parse_poly_free("x1^2 + x2^2").unwrap();
        let vars: Vec<Var> = r.vars().into_iter().collect();
        let v = double_cover_beta(&r, &vars, &Evaluator::default()).unwrap();
        assert_eq!(v.to_string(), "u^2");
    }
}
