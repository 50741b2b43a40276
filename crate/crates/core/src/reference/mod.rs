//! Full-order references: Crank–Nicolson in both formulations, Newmark,
//! the closed-form series for a released pre-strained bar, and SVD truncation.

pub mod analytical;
pub mod cn;
pub mod newmark;
pub mod svd;

use nalgebra::DMatrix;

pub use analytical::{analytical_field, analytical_series, eigenpair, SeriesParams};
pub use cn::{solve_hamiltonian_cn, solve_lagrangian_cn};
pub use newmark::{newmark_dense, solve_newmark};
pub use svd::{svd_baseline, SvdBaseline};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    LagrangianCn,
    HamiltonianCn,
    Newmark,
}

/// Full-order solution over all free DOFs, one column per time node.
#[derive(Debug, Clone)]
pub struct TrajectorySet {
    pub kind: TrajectoryKind,
    pub displacement: DMatrix<f64>,
    /// Velocity for the Lagrangian solvers, momentum for the Hamiltonian one.
    pub companion: DMatrix<f64>,
    /// Momentum field; for Lagrangian solvers `M̄⁻¹ M` applied to the velocity.
    pub momentum: DMatrix<f64>,
    /// Nodal accelerations (Newmark only).
    pub acceleration: Option<DMatrix<f64>>,
}
