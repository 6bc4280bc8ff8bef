//! Classes of affine quadric hypersurfaces over the rationals.

use num_traits::{Signed, Zero};

use super::VirtualPoly;
use crate::poly::{rat, Poly, Rational, Var};

/// Shape of `{Q = 0}` after a rational affine change of coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadricShape {
    /// `Q` has a linear part transverse to its quadratic part: a graph.
    Graph { n: usize },
    /// `sum(lambda_i w_i^2) = 0` with `p` positive and `q` negative weights.
    Cone { p: usize, q: usize, cylinder: usize },
    /// `sum(mu_i w_i^2) = 1` with `p` positive and `q` negative weights.
    Central { p: usize, q: usize, cylinder: usize },
}

/// Diagonalizes `q` (total degree at most 2) by completing squares.
pub fn classify(q: &Poly) -> Option<QuadricShape> {
    if q.total_degree() > 2 || q.is_constant() {
        return None;
    }
    let n = q.vars().len();
    let mut rest = q.clone();
    let mut lambdas: Vec<Rational> = Vec::new();
    let mut fresh = 0usize;
    loop {
        let square = rest.vars().into_iter().find(|v| rest.degree_in(v) == 2);
        if let Some(v) = square {
            let c = rest.coeffs_in(&v);
            let (c0, b, a) = (&c[0], &c[1], c[2].constant_value().unwrap());
            // a v^2 + b v + c0 = a (v + b / 2a)^2 + c0 - b^2 / 4a
            rest = c0 - &(b * b).scale(&(Rational::from_integer(1.into()) / (rat(4) * &a)));
            lambdas.push(a);
            continue;
        }
        let cross = rest
            .terms()
            .find(|(m, _)| m.degree() == 2)
            .map(|(m, _)| (m.pairs()[0].0.clone(), m.pairs()[1].0.clone()));
        if let Some((v, w)) = cross {
            fresh += 1;
            let s = Poly::var(Var::new(&format!("\u{1}s{fresh}")));
            let t = Poly::var(Var::new(&format!("\u{1}t{fresh}")));
            rest = rest.substitute(&v, &(&s + &t)).substitute(&w, &(&s - &t));
            continue;
        }
        break;
    }
    if !rest.is_constant() {
        return Some(QuadricShape::Graph { n });
    }
    let c = rest.constant_term();
    let r = lambdas.len();
    let cylinder = n - r;
    if c.is_zero() {
        let p = lambdas.iter().filter(|l| l.is_positive()).count();
        return Some(QuadricShape::Cone {
            p,
            q: r - p,
            cylinder,
        });
    }
    // sum lambda w^2 = -c
    let p = lambdas
        .iter()
        .filter(|l| (*l / &-c.clone()).is_positive())
        .count();
    Some(QuadricShape::Central {
        p,
        q: r - p,
        cylinder,
    })
}

/// `{sum_p a^2 - sum_q b^2 = 1}`.
fn central(p: usize, q: usize) -> VirtualPoly {
    match (p, q) {
        (0, _) => VirtualPoly::zero(),
        (p, 0) => &VirtualPoly::u_pow(p as i64 - 1) + &VirtualPoly::one(),
        (p, q) => {
            let torus = &(&VirtualPoly::u() - &VirtualPoly::one())
                * &VirtualPoly::u_pow((p + q) as i64 - 2);
            &torus + &(&VirtualPoly::u() * &central(p - 1, q - 1))
        }
    }
}

/// `{sum_p a^2 - sum_q b^2 = 0}`.
fn cone(p: usize, q: usize) -> VirtualPoly {
    if p == 0 || q == 0 {
        return VirtualPoly::one();
    }
    let torus =
        &(&VirtualPoly::u() - &VirtualPoly::one()) * &VirtualPoly::u_pow((p + q) as i64 - 2);
    &torus + &(&VirtualPoly::u() * &cone(p - 1, q - 1))
}

impl QuadricShape {
    pub fn class(&self) -> VirtualPoly {
        match *self {
            QuadricShape::Graph { n } => VirtualPoly::u_pow(n as i64 - 1),
            QuadricShape::Cone { p, q, cylinder } => {
                &cone(p, q) * &VirtualPoly::u_pow(cylinder as i64)
            }
            QuadricShape::Central { p, q, cylinder } => {
                &central(p, q) * &VirtualPoly::u_pow(cylinder as i64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_poly_free;

    fn class_of(s: &str) -> String {
        classify(&parse_poly_free(s).unwrap())
            .unwrap()
            .class()
            .to_string()
    }

    #[test]
    fn conics() {
        assert_eq!(class_of("x^2 + y^2 - 1"), "u + 1");
        assert_eq!(class_of("x^2 - y^2 - 1"), "u - 1");
        assert_eq!(class_of("x*y - 1/4"), "u - 1");
        assert_eq!(class_of("x^2 + y^2 + 1"), "0");
        assert_eq!(class_of("x^2 + y^2"), "1");
        assert_eq!(class_of("x^2 - y^2"), "2*u - 1");
        assert_eq!(class_of("x^2 - y"), "u");
        assert_eq!(class_of("x^2 - 1 + 0*y"), "2");
        assert_eq!(class_of("x^2 - 2*x*y + y^2 - 1"), "2*u");
        assert_eq!(class_of("x^2 - 2*x*y + y^2"), "u");
    }

    #[test]
    fn quadric_surfaces() {
        assert_eq!(class_of("x^2 + y^2 + z^2 - 1"), "u^2 + 1");
        assert_eq!(class_of("x^2 + y^2 - z^2 - 1"), "u^2 + u");
        assert_eq!(class_of("z^2 - x^2 - y^2 - 1"), "u^2 - u");
        assert_eq!(class_of("z^2 - x^2 - y^2"), "u^2");
        assert_eq!(class_of("x^2 + y^2 - z"), "u^2");
        assert_eq!(
            class_of("x*y + y*z + z*x - 1"),
            class_of("x^2 - y^2 - z^2 - 1")
        );
    }

    #[test]
    fn two_sheets_agree_with_a_graph_description() {
        // (x - y)(x + y) = 1 + z^2 is a graph over {s != 0} x R
        assert_eq!(class_of("x^2 - y^2 - z^2 - 1"), "u^2 - u");
    }
}
