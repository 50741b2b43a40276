//! Load vectors and projection of initial data.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};
use crate::fem::mesh::{Mesh1D, TimeGrid};
use crate::fem::scenario::{BodyLoad, RightBoundary, Scenario};
use crate::linalg::col_mut;

const GAUSS_2: f64 = 0.577_350_269_189_625_8; // 1/√3

/// Load trajectory `Fᵢ(tⁿ) = ∫ φᵢ f dx + φᵢ(ℓ) g(tⁿ)`, one column per time node.
///
/// Only valid for traction or free right ends; a prescribed displacement
/// enters the homogeneous problem through the lift instead.
pub fn assemble_load(mesh: &Mesh1D, scenario: &Scenario, grid: &TimeGrid) -> Result<DMatrix<f64>> {
    let traction = match &scenario.right {
        RightBoundary::Traction(g) => Some(g),
        RightBoundary::Free => None,
        RightBoundary::Displacement(_) => {
            return Err(PgdError::InvalidState(
                "load assembly with a Dirichlet right end; use the lift instead".into(),
            ))
        }
    };
    let mut load = assemble_body_load(mesh, &scenario.body, grid);
    if let Some(g) = traction {
        let last = mesh.free_dofs() - 1;
        for n in 0..grid.nodes() {
            load[(last, n)] += g.value(grid.t(n));
        }
    }
    Ok(load)
}

/// `∫ φᵢ f(x, tⁿ) dx` with two-point Gauss quadrature per element.
pub fn assemble_body_load(mesh: &Mesh1D, body: &BodyLoad, grid: &TimeGrid) -> DMatrix<f64> {
    let n_free = mesh.free_dofs();
    let mut load = DMatrix::zeros(n_free, grid.nodes());
    if body.is_zero() {
        return load;
    }
    for n in 0..grid.nodes() {
        let t = grid.t(n);
        let column = col_mut(&mut load, n);
        for e in 0..mesh.element_count() {
            let (a, b) = mesh.element(e);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for xi in [-GAUSS_2, GAUSS_2] {
                let x = mid + half * xi;
                let f = body.eval(x, t) * half;
                let phi_left = 0.5 * (1.0 - xi);
                let phi_right = 0.5 * (1.0 + xi);
                if e >= 1 {
                    column[e - 1] += f * phi_left;
                }
                column[e] += f * phi_right;
            }
        }
    }
    load
}

/// Nodal interpolants of the initial data at the free nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub displacement: DVector<f64>,
    pub velocity: DVector<f64>,
    pub momentum: DVector<f64>,
}

pub fn project_initial(mesh: &Mesh1D, scenario: &Scenario) -> Result<InitialData> {
    let u0 = &scenario.initial_displacement;
    let v0 = &scenario.initial_velocity;
    let xs = mesh.free_nodes();
    let displacement = DVector::from_iterator(xs.len(), xs.iter().map(|&x| u0.eval(x)));
    let velocity = DVector::from_iterator(xs.len(), xs.iter().map(|&x| v0.eval(x)));
    let scale = 1.0 + displacement.amax();
    if u0.eval(0.0).abs() > 1e-12 * scale {
        return Err(PgdError::IncompatibleInitialData(format!(
            "u0(0) = {} but the end x = 0 is clamped",
            u0.eval(0.0)
        )));
    }
    let inertia = scenario.material.nodal_inertia(mesh);
    let momentum = DVector::from_iterator(
        xs.len(),
        velocity.iter().zip(&inertia).map(|(v, r)| v * r),
    );
    Ok(InitialData {
        displacement,
        velocity,
        momentum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Material;
    use crate::fem::scenario::{Profile, Signal};

    fn unit_scenario(elements: usize) -> Scenario {
        Scenario::quiescent(Material::new(1.0, 1.0, 1.0, 0.0).unwrap(), 1.0, elements, 1.0, 4)
    }

    #[test]
    fn neumann_pulse_sits_on_last_dof() {
        let mut sc = unit_scenario(8);
        sc.horizon = 1.15e-3;
        let g = Signal::RampCosine {
            amplitude: 1e6,
            omega: 4.4e4,
            cutoff: Some(sc.horizon / 2.0),
        };
        sc.right = RightBoundary::Traction(g.clone());
        let mesh = sc.mesh().unwrap();
        let grid = sc.grid().unwrap();
        let f = assemble_load(&mesh, &sc, &grid).unwrap();
        for n in 0..grid.nodes() {
            for i in 0..7 {
                assert_eq!(f[(i, n)], 0.0);
            }
            assert_eq!(f[(7, n)], g.value(grid.t(n)));
        }
    }

    #[test]
    fn zero_load_is_zero() {
        let sc = unit_scenario(3);
        let f = assemble_load(&sc.mesh().unwrap(), &sc, &sc.grid().unwrap()).unwrap();
        assert_eq!(f.amax(), 0.0);
    }

    #[test]
    fn uniform_body_load_interior_entry_is_h() {
        let mut sc = unit_scenario(2);
        sc.body = BodyLoad::Uniform(Signal::Constant(1.0));
        let f = assemble_load(&sc.mesh().unwrap(), &sc, &sc.grid().unwrap()).unwrap();
        assert!((f[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((f[(1, 0)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_load_is_rejected() {
        let mut sc = unit_scenario(2);
        sc.right = RightBoundary::Displacement(Signal::Zero);
        let err = assemble_load(&sc.mesh().unwrap(), &sc, &sc.grid().unwrap());
        assert!(matches!(err, Err(PgdError::InvalidState(_))));
    }

    #[test]
    fn projections() {
        let mut sc = unit_scenario(4);
        sc.length = 0.2;
        sc.initial_displacement = Profile::Linear { slope: 0.05 };
        let mesh = sc.mesh().unwrap();
        let init = project_initial(&mesh, &sc).unwrap();
        assert!((init.displacement[3] - 0.01).abs() < 1e-15);

        let mut sc = unit_scenario(4);
        sc.material = Material::new(1.0, 1.0, 3.0, 0.0).unwrap();
        sc.initial_velocity = Profile::Linear { slope: 1.0 };
        let mesh = sc.mesh().unwrap();
        let init = project_initial(&mesh, &sc).unwrap();
        for (p, x) in init.momentum.iter().zip(mesh.free_nodes()) {
            assert!((p - 3.0 * x).abs() < 1e-15);
        }

        let sc0 = unit_scenario(4);
        let init = project_initial(&sc0.mesh().unwrap(), &sc0).unwrap();
        assert_eq!(init.displacement.amax() + init.velocity.amax() + init.momentum.amax(), 0.0);
    }

    #[test]
    fn clamped_end_incompatibility() {
        let mut sc = unit_scenario(4);
        sc.initial_displacement = Profile::custom(|x| 1.0 + x);
        let err = project_initial(&sc.mesh().unwrap(), &sc);
        assert!(matches!(err, Err(PgdError::IncompatibleInitialData(_))));
    }
}
