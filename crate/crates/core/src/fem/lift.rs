//! Lift fields carrying the non-homogeneous initial and Dirichlet data, so
//! every enrichment mode satisfies homogeneous conditions.

use nalgebra::DMatrix;

use crate::error::{PgdError, Result};
use crate::fem::load::project_initial;
use crate::fem::mesh::{Mesh1D, TimeGrid};
use crate::fem::scenario::{RightBoundary, Scenario};

/// Nodal lift trajectories over the free DOFs (one column per time node).
///
/// With `u₀`, `v₀` the initial data and, for a Dirichlet end, `s(t)` the
/// prescribed displacement:
///
/// `q₀(x, t) = u₀(x) + t v₀(x) + (x/ℓ)(s(t) − s(0) − t ṡ(0))`
///
/// which reduces to zero for homogeneous data, to `u₀` for pure initial
/// displacement and to `(x/ℓ) s(t)` for a Dirichlet pulse starting at rest.
#[derive(Debug, Clone)]
pub struct LiftField {
    pub displacement: DMatrix<f64>,
    pub velocity: DMatrix<f64>,
    pub acceleration: DMatrix<f64>,
    /// `p₀ = ρA q̇₀`, nodal.
    pub momentum: DMatrix<f64>,
    /// `ṗ₀ = ρA q̈₀`, nodal.
    pub momentum_rate: DMatrix<f64>,
    pub is_zero: bool,
}

pub fn build_lift(mesh: &Mesh1D, scenario: &Scenario, grid: &TimeGrid) -> Result<LiftField> {
    let init = project_initial(mesh, scenario)?;
    let n = mesh.free_dofs();
    let nt = grid.nodes();
    let xs = mesh.free_nodes();
    let len = mesh.length();

    let dirichlet = match &scenario.right {
        RightBoundary::Displacement(s) => Some(s),
        _ => None,
    };
    if let Some(s) = dirichlet {
        let [s0, ds0, _] = s.eval(0.0);
        let tol = 1e-12 * (1.0 + s0.abs() + init.displacement.amax());
        if (init.displacement[n - 1] - s0).abs() > tol {
            return Err(PgdError::IncompatibleInitialData(format!(
                "u0(ℓ) = {} differs from the prescribed displacement {s0}",
                init.displacement[n - 1]
            )));
        }
        let vtol = 1e-12 * (1.0 + ds0.abs() + init.velocity.amax());
        if (init.velocity[n - 1] - ds0).abs() > vtol {
            return Err(PgdError::IncompatibleInitialData(format!(
                "v0(ℓ) = {} differs from the prescribed velocity {ds0}",
                init.velocity[n - 1]
            )));
        }
    }

    let inertia = scenario.material.nodal_inertia(mesh);
    let mut displacement = DMatrix::zeros(n, nt);
    let mut velocity = DMatrix::zeros(n, nt);
    let mut acceleration = DMatrix::zeros(n, nt);
    for k in 0..nt {
        let t = grid.t(k);
        let boundary = dirichlet.map(|s| {
            let [s0, ds0, _] = s.eval(0.0);
            let [st, dst, ddst] = s.eval(t);
            (st - s0 - t * ds0, dst - ds0, ddst)
        });
        for i in 0..n {
            let mut q = init.displacement[i] + t * init.velocity[i];
            let mut v = init.velocity[i];
            let mut a = 0.0;
            if let Some((b, db, ddb)) = boundary {
                let w = xs[i] / len;
                q += w * b;
                v += w * db;
                a += w * ddb;
            }
            displacement[(i, k)] = q;
            velocity[(i, k)] = v;
            acceleration[(i, k)] = a;
        }
    }
    let mut momentum = velocity.clone();
    let mut momentum_rate = acceleration.clone();
    for (i, r) in inertia.iter().enumerate() {
        momentum.row_mut(i).scale_mut(*r);
        momentum_rate.row_mut(i).scale_mut(*r);
    }
    let is_zero = displacement.amax() == 0.0 && velocity.amax() == 0.0 && acceleration.amax() == 0.0;
    Ok(LiftField {
        displacement,
        velocity,
        acceleration,
        momentum,
        momentum_rate,
        is_zero,
    })
}
