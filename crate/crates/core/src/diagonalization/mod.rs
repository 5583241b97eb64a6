//! Vandermonde frame, gauge solves and the asymptotic exponents.

mod frame;
mod gauge;
mod reduced;
mod rotate;

pub use frame::{build_frame, Frame};
pub use gauge::{
    comm_gamma, error_blocks, exponents, log_t, normalized, solve_gauge, table_roots, ErrorBlocks, ExponentData,
    ExponentRecord, GaugeData, GAP_FLOOR,
};
pub use reduced::{reduced_system, ReducedSystem};
pub use rotate::rotate;
