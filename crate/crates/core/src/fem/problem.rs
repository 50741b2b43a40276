//! A fully discretized problem: operators on the active DOFs plus the forcing
//! trajectories of the homogeneous problem left after subtracting the lift.

use nalgebra::DMatrix;

use crate::error::{PgdError, Result};
use crate::fem::lift::{build_lift, LiftField};
use crate::fem::load::{assemble_body_load, assemble_load};
use crate::fem::mesh::{Mesh1D, TimeGrid};
use crate::fem::operators::OperatorSet;
use crate::fem::scenario::Scenario;
use crate::linalg::{col, col_mut, SymTridiagonal};

#[derive(Debug, Clone)]
pub struct Problem {
    pub scenario: Scenario,
    pub mesh: Mesh1D,
    pub grid: TimeGrid,
    /// Operators over all free DOFs.
    pub full_ops: OperatorSet,
    /// Operators over the active (unconstrained) DOFs.
    pub ops: OperatorSet,
    pub active: usize,
    pub lift: LiftField,
    /// `F` over all free DOFs (body load plus traction).
    pub load: DMatrix<f64>,
    /// `F − M q̈₀ − C q̇₀ − K q₀` on active rows.
    pub lagrangian_forcing: DMatrix<f64>,
    /// `F − M̄ ṗ₀ − C̃ p₀ − K q₀` on active rows.
    pub hamiltonian_forcing: DMatrix<f64>,
    /// `M̄̄ p₀ − M̄ q̇₀` on active rows; right-hand side of `M̄ ẇ − M̄̄ π = k`.
    pub kinematic_forcing: DMatrix<f64>,
}

/// Apply a tridiagonal operator to every column of a space-time field.
pub fn apply_columns(op: &SymTridiagonal, field: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(field.nrows(), field.ncols());
    for k in 0..field.ncols() {
        op.mul_into(col(field, k), col_mut(&mut out, k));
    }
    out
}

impl Problem {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let mesh = scenario.mesh()?;
        let grid = scenario.grid()?;
        let full_ops = OperatorSet::assemble(&mesh, &scenario.material)?;
        let n = mesh.free_dofs();
        let dirichlet = scenario.right.is_dirichlet();
        let active = if dirichlet { n - 1 } else { n };
        if active == 0 {
            return Err(PgdError::invalid("no unconstrained degrees of freedom"));
        }
        let load = if dirichlet {
            assemble_body_load(&mesh, &scenario.body, &grid)
        } else {
            assemble_load(&mesh, scenario, &grid)?
        };
        let lift = build_lift(&mesh, scenario, &grid)?;
        let ops = full_ops.leading(active);

        let (lagrangian_forcing, hamiltonian_forcing, kinematic_forcing) = if lift.is_zero {
            let f = load.rows(0, active).into_owned();
            (f.clone(), f, DMatrix::zeros(active, grid.nodes()))
        } else {
            let kq = apply_columns(&full_ops.stiffness, &lift.displacement);
            let lag = &load
                - apply_columns(&full_ops.mass, &lift.acceleration)
                - apply_columns(&full_ops.damping, &lift.velocity)
                - &kq;
            let ham = &load
                - apply_columns(&full_ops.l2_mass, &lift.momentum_rate)
                - apply_columns(&full_ops.momentum_damping, &lift.momentum)
                - &kq;
            let kin = apply_columns(&full_ops.compliance_mass, &lift.momentum)
                - apply_columns(&full_ops.l2_mass, &lift.velocity);
            (
                lag.rows(0, active).into_owned(),
                ham.rows(0, active).into_owned(),
                kin.rows(0, active).into_owned(),
            )
        };

        Ok(Self {
            scenario: scenario.clone(),
            mesh,
            grid,
            full_ops,
            ops,
            active,
            lift,
            load,
            lagrangian_forcing,
            hamiltonian_forcing,
            kinematic_forcing,
        })
    }

    pub fn free_dofs(&self) -> usize {
        self.mesh.free_dofs()
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt()
    }

    pub fn time_nodes(&self) -> usize {
        self.grid.nodes()
    }

    fn pad(&self, homogeneous: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if homogeneous.nrows() != self.active || homogeneous.ncols() != self.time_nodes() {
            return Err(PgdError::invalid(format!(
                "field is {}×{}, expected {}×{}",
                homogeneous.nrows(),
                homogeneous.ncols(),
                self.active,
                self.time_nodes()
            )));
        }
        let mut full = DMatrix::zeros(self.free_dofs(), self.time_nodes());
        full.rows_mut(0, self.active).copy_from(homogeneous);
        Ok(full)
    }

    /// Full displacement `q₀ + w` from a homogeneous field on the active DOFs.
    pub fn embed_displacement(&self, homogeneous: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.pad(homogeneous)? + &self.lift.displacement)
    }

    pub fn embed_velocity(&self, homogeneous: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.pad(homogeneous)? + &self.lift.velocity)
    }

    pub fn embed_momentum(&self, homogeneous: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.pad(homogeneous)? + &self.lift.momentum)
    }

    /// Momentum `M̄⁻¹ M v` from a full nodal velocity field.
    pub fn momentum_from_velocity(&self, velocity: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let lu = self.full_ops.l2_mass.factor()?;
        let mut out = apply_columns(&self.full_ops.mass, velocity);
        for k in 0..out.ncols() {
            lu.solve_in_place(col_mut(&mut out, k));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Material;
    use crate::fem::scenario::{RightBoundary, Signal};

    fn steel() -> Material {
        Material::new(220e9, 1e-3, 7000.0, 0.0).unwrap()
    }

    #[test]
    fn dirichlet_restricts_active_dofs() {
        let mut sc = Scenario::quiescent(steel(), 0.2, 10, 1e-3, 20);
        sc.right = RightBoundary::Displacement(Signal::RampCosine {
            amplitude: 5e-3,
            omega: 1.1e4,
            cutoff: None,
        });
        let p = Problem::new(&sc).unwrap();
        assert_eq!(p.active, 9);
        assert_eq!(p.ops.dim(), 9);
        let full = p.embed_displacement(&DMatrix::zeros(9, 21)).unwrap();
        assert_eq!(full[(9, 20)], sc.right_signal_value(20.0 * 1e-3 / 20.0));
        assert!(p.embed_displacement(&DMatrix::zeros(10, 21)).is_err());
    }

    #[test]
    fn constant_density_momentum_is_nodal() {
        let sc = Scenario::quiescent(steel(), 0.2, 6, 1e-3, 4);
        let p = Problem::new(&sc).unwrap();
        let v = DMatrix::from_fn(6, 5, |i, k| (i as f64 + 1.0) * (k as f64 - 1.5));
        let m = p.momentum_from_velocity(&v).unwrap();
        assert!((m - v * 7.0).amax() < 1e-12);
    }

    impl Scenario {
        fn right_signal_value(&self, t: f64) -> f64 {
            match &self.right {
                RightBoundary::Displacement(s) | RightBoundary::Traction(s) => s.value(t),
                RightBoundary::Free => 0.0,
            }
        }
    }
}
