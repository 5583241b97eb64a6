//! Normal-ordered ODE realizations of an operator and their coefficient tables.

mod companion;
mod ode;
mod table;

pub use companion::CompanionMatrix;
pub use ode::{deriv_poly, eval_poly, realize, Mono, MonomialRecord, OdeRealization, Sign};
pub use table::{coefficient_table, eval_q, CoeffTable, EpsTerm, QParts};
