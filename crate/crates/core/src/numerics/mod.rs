pub mod basis;
pub mod dopri;
pub mod levinson;
pub mod matching;
pub mod model;
pub mod sweep;
pub mod wronskian;

pub use basis::{basis_on_path, canonical_basis, mirrored_basis, ray_basis, BasisJet};
pub use model::{ginv_of, OdeModel};
pub use sweep::{qr_sweep, recessive_order, Jet, Path, Sweep};
pub use wronskian::{abel_check, adjoint_kernel_basis, wronskians, AbelReport, AdjointKernel, WronskianData};
pub use matching::{block_pattern, degenerate_rows, gamma_scan, schwartz_match, schwartz_match_realization, schwartz_match_top, sigma_of, transition_matrix, DegenerateRow, MatchReport, ScanReport, ScanRow, TransitionReport};
pub use levinson::{integrate_w, leading_w, reduce_system, reduction_of_order, NextSolution, VSystem, WSystem, WTrajectory};
