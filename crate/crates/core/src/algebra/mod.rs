//! Noncommutative polynomials in X, Y and their characteristic roots.

mod parse;
mod poly;
mod roots;

pub use parse::parse_operator;
pub use poly::{
    commutative_symbol, homogeneous_part, symbol_coefficients, Letter, NcPolynomial, NcWord, TermRecord,
};
pub use roots::{
    aberth_roots, characteristic_roots, check_generic, companion_roots, cross_validated_roots, is_ordered,
    min_pairwise_gap, order_roots, root_set_distance, GenericityReport,
};
