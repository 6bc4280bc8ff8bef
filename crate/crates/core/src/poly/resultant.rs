//! Resultants and principal subresultant coefficients via fraction-free
//! elimination on Sylvester-type matrices.

use super::{Poly, PolyError, Var};

/// Determinant of a square matrix of polynomials (Bareiss, with row pivoting).
pub fn determinant(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// The matrix whose determinant is the `j`-th principal subresultant coefficient.
fn psc_matrix(f: &[Poly], g: &[Poly], j: usize) -> Vec<Vec<Poly>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n - 2 * j;
    let width = m + n - j;
    let mut rows = Vec::with_capacity(size);
    // columns index powers width-1 .. 0 (highest first)
    let row_of = |coeffs: &[Poly], shift: usize| -> Vec<Poly> {
        let deg = coeffs.len() - 1;
        (0..size)
            .map(|col| {
                let power = width - 1 - col;
                power
                    .checked_sub(shift)
                    .filter(|&p| p <= deg)
                    .map(|p| coeffs[p].clone())
                    .unwrap_or_else(Poly::zero)
            })
            .collect()
    };
    for s in (0..n - j).rev() {
        rows.push(row_of(f, s));
    }
    for s in (0..m - j).rev() {
        rows.push(row_of(g, s));
    }
    rows
}

fn coeffs_checked(p: &Poly, var: &Var) -> Result<Vec<Poly>, PolyError> {
    let c = p.coeffs_in(var);
    if c.len() < 2 {
        return Err(PolyError::Degenerate {
            poly: p.to_string(),
            var: var.to_string(),
        });
    }
    Ok(c)
}

/// Classical resultant of `p` and `q` with respect to `var`.
pub fn resultant(p: &Poly, q: &Poly, var: &Var) -> Result<Poly, PolyError> {
    let f = coeffs_checked(p, var)?;
    let g = coeffs_checked(q, var)?;
    Ok(determinant(psc_matrix(&f, &g, 0)))
}

/// Principal subresultant coefficients `psc_0 .. psc_{min(deg p, deg q) - 1}`.
///
/// Inputs must both have positive degree in `var`.
pub fn principal_subresultants(p: &Poly, q: &Poly, var: &Var) -> Result<Vec<Poly>, PolyError> {
    let f = coeffs_checked(p, var)?;
    let g = coeffs_checked(q, var)?;
    let k = (f.len() - 1).min(g.len() - 1);
    Ok((0..k).map(|j| determinant(psc_matrix(&f, &g, j))).collect())
}

/// Discriminant-style coefficients of `p` and its derivative.
pub fn discriminant_coeffs(p: &Poly, var: &Var) -> Result<Vec<Poly>, PolyError> {
    principal_subresultants(p, &p.derivative(var), var)
}
