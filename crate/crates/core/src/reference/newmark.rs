//! Newmark average-acceleration integration (γ = 1/2, β = 1/4).

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};
use crate::fem::problem::Problem;
use crate::linalg::{col, col_mut, SymTridiagonal};
use crate::reference::{TrajectoryKind, TrajectorySet};

/// Newmark on the full-order homogeneous problem, lift added afterwards.
pub fn solve_newmark(problem: &Problem) -> Result<TrajectorySet> {
    let ops = &problem.ops;
    let h = problem.dt();
    let g = &problem.lagrangian_forcing;
    let n = problem.active;
    let nt = problem.time_nodes();

    let effective = SymTridiagonal::combine(&[
        (1.0, &ops.mass),
        (0.5 * h, &ops.damping),
        (0.25 * h * h, &ops.stiffness),
    ])
    .factor()?;
    let mass_lu = ops.mass.factor()?;

    let mut u = DMatrix::zeros(n, nt);
    let mut v = DMatrix::zeros(n, nt);
    let mut a = DMatrix::zeros(n, nt);
    let mut a0 = col(g, 0).to_vec();
    mass_lu.solve_in_place(&mut a0);
    col_mut(&mut a, 0).copy_from_slice(&a0);

    let mut pred_u = vec![0.0; n];
    let mut pred_v = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for k in 0..nt - 1 {
        for i in 0..n {
            pred_u[i] = u[(i, k)] + h * v[(i, k)] + 0.25 * h * h * a[(i, k)];
            pred_v[i] = v[(i, k)] + 0.5 * h * a[(i, k)];
        }
        let mut rhs = col(g, k + 1).to_vec();
        ops.stiffness.mul_into(&pred_u, &mut tmp);
        rhs.iter_mut().zip(&tmp).for_each(|(r, t)| *r -= t);
        if problem.ops.is_damped() {
            ops.damping.mul_into(&pred_v, &mut tmp);
            rhs.iter_mut().zip(&tmp).for_each(|(r, t)| *r -= t);
        }
        effective.solve_in_place(&mut rhs);
        for i in 0..n {
            let an = rhs[i];
            a[(i, k + 1)] = an;
            u[(i, k + 1)] = pred_u[i] + 0.25 * h * h * an;
            v[(i, k + 1)] = pred_v[i] + 0.5 * h * an;
        }
        if rhs.iter().any(|x| !x.is_finite()) {
            return Err(PgdError::SolverFailure(format!("non-finite state at step {}", k + 1)));
        }
    }

    let displacement = problem.embed_displacement(&u)?;
    let velocity = problem.embed_velocity(&v)?;
    let mut acceleration = DMatrix::zeros(problem.free_dofs(), nt);
    acceleration.rows_mut(0, n).copy_from(&a);
    acceleration += &problem.lift.acceleration;
    let momentum = problem.momentum_from_velocity(&velocity)?;
    Ok(TrajectorySet {
        kind: TrajectoryKind::Newmark,
        displacement,
        companion: velocity,
        momentum,
        acceleration: Some(acceleration),
    })
}

/// Newmark for a small dense system `M ü + C u̇ + K u = f(t)` with zero
/// initial state; `forcing` holds `f` at every time node.
/// Returns displacement, velocity and acceleration trajectories.
pub fn newmark_dense(
    m: &DMatrix<f64>,
    c: &DMatrix<f64>,
    k: &DMatrix<f64>,
    forcing: &DMatrix<f64>,
    h: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let d = m.nrows();
    let nt = forcing.ncols();
    if forcing.nrows() != d || c.shape() != (d, d) || k.shape() != (d, d) {
        return Err(PgdError::invalid("newmark_dense: dimension mismatch"));
    }
    let mass_lu = m.clone().lu();
    let eff = (m + c * (0.5 * h) + k * (0.25 * h * h)).lu();
    let mut u = DMatrix::zeros(d, nt);
    let mut v = DMatrix::zeros(d, nt);
    let mut a = DMatrix::zeros(d, nt);
    let a0 = mass_lu
        .solve(&forcing.column(0).into_owned())
        .ok_or_else(|| PgdError::SolverFailure("singular mass in Newmark start".into()))?;
    a.set_column(0, &a0);
    for n in 0..nt - 1 {
        let pu: DVector<f64> = u.column(n) + v.column(n) * h + a.column(n) * (0.25 * h * h);
        let pv: DVector<f64> = v.column(n) + a.column(n) * (0.5 * h);
        let rhs = forcing.column(n + 1) - k * &pu - c * &pv;
        let an = eff
            .solve(&rhs)
            .ok_or_else(|| PgdError::SolverFailure("singular Newmark effective matrix".into()))?;
        u.set_column(n + 1, &(pu + &an * (0.25 * h * h)));
        v.set_column(n + 1, &(pv + &an * (0.5 * h)));
        a.set_column(n + 1, &an);
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(PgdError::SolverFailure("non-finite Newmark state".into()));
    }
    Ok((u, v, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Material;
    use crate::fem::scenario::{RightBoundary, Scenario, Signal};
    use crate::reference::solve_lagrangian_cn;

    #[test]
    fn scalar_oscillator_keeps_amplitude() {
        // Free oscillation from (u, v) = (1, 0), expressed as the response to
        // an equivalent zero-start problem is awkward; step the recurrence directly.
        let h = 0.1;
        let (mut u, mut v, mut a) = (1.0_f64, 0.0_f64, -1.0_f64);
        for _ in 0..1000 {
            let pu = u + h * v + 0.25 * h * h * a;
            let pv = v + 0.5 * h * a;
            let an = -pu / (1.0 + 0.25 * h * h);
            u = pu + 0.25 * h * h * an;
            v = pv + 0.5 * h * an;
            a = an;
        }
        assert!((0.5 * (u * u + v * v) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dense_matches_scalar_closed_form_start() {
        let one = DMatrix::from_element(1, 1, 1.0);
        let zero = DMatrix::zeros(1, 1);
        let f = DMatrix::from_element(1, 3, 2.0);
        let (u, v, a) = newmark_dense(&one, &zero, &zero, &f, 0.5).unwrap();
        // constant unit-mass force: u = t², exact for average acceleration
        assert!((u[(0, 2)] - 4.0 * 0.25).abs() < 1e-15);
        assert!((v[(0, 2)] - 2.0).abs() < 1e-15);
        assert_eq!(a[(0, 2)], 2.0);
    }

    #[test]
    fn newmark_coincides_with_lagrangian_cn() {
        let mut sc = Scenario::quiescent(
            Material::new(220e9, 1e-3, 7000.0, 0.0).unwrap(),
            0.2,
            16,
            1.15e-3,
            64,
        );
        sc.right = RightBoundary::Traction(Signal::RampCosine {
            amplitude: 1e6,
            omega: 4.4e4,
            cutoff: Some(0.575e-3),
        });
        let p = Problem::new(&sc).unwrap();
        let nm = solve_newmark(&p).unwrap();
        let cn = solve_lagrangian_cn(&p).unwrap();
        let d = (&nm.displacement - &cn.displacement).amax() / cn.displacement.amax();
        assert!(d < 1e-9, "{d}");
    }
}
