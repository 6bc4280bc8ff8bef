//! The symbolic Grothendieck ring: classes as `Z[1/2]`-combinations of
//! descriptor atoms and powers of `L`, and the morphism `chi` from formulas.

mod chi;
mod class;
mod descriptor;

pub use chi::{
    algebraic_class, chi_closed_form, chi_inductive, eliminate_neq, measure_geq, odd_symmetry,
};
pub use class::{Atom, ClassExpr};
pub use descriptor::{is_cover, Descriptor, COVER_PREFIX};
