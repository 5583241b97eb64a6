//! Local solvability analysis for left-invariant operators `L = sum P_l(X, Y)`
//! on the Heisenberg group, through the one-parameter family of ordinary
//! differential operators obtained by realizing `X -> i d/dt`, `Y -> ±t`.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod diagonalization;
pub mod realization;
pub mod error;
pub mod numerics;
pub mod scalar;
pub mod verdict;
pub mod verify;

pub use error::{HsolvError, Result};
