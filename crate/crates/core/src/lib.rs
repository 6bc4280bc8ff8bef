//! Exact calculator for the Grothendieck ring of basic real semialgebraic
//! formulas.

pub mod arcs;
pub mod cad;
pub mod catalog;
pub mod formula;
pub mod k0;
pub mod poly;
pub mod zeta;
