//! Space-time norms, relative errors, energies and conditioning diagnostics.

use nalgebra::DMatrix;

use crate::error::{PgdError, Result};
use crate::fem::{OperatorSet, Problem};
use crate::pgd::{EnrichmentLog, Method};
use crate::reference::{TrajectoryKind, TrajectorySet};
use crate::linalg::{col, SymTridiagonal};

pub use crate::linalg::condition_number;

/// `‖f‖² = ∫∫ f² dx dt`: spatial integral through the mass metric `g`,
/// temporal integral exact for piecewise-linear interpolation.
pub fn spacetime_norm(field: &DMatrix<f64>, g: &SymTridiagonal, dt: f64) -> Result<f64> {
    if field.nrows() != g.dim() {
        return Err(PgdError::invalid(format!(
            "field has {} rows, metric has dimension {}",
            field.nrows(),
            g.dim()
        )));
    }
    let nt = field.ncols();
    if nt < 2 {
        return Err(PgdError::invalid("space-time field needs at least two time nodes"));
    }
    let mut gf = vec![0.0; g.dim()];
    let mut diag = vec![0.0; nt];
    let mut cross = vec![0.0; nt - 1];
    for k in 0..nt {
        g.mul_into(col(field, k), &mut gf);
        diag[k] = crate::linalg::dot(col(field, k), &gf);
        if k + 1 < nt {
            cross[k] = crate::linalg::dot(col(field, k + 1), &gf);
        }
    }
    let mut sum = 0.0;
    for k in 0..nt - 1 {
        sum += 2.0 * diag[k] + 2.0 * cross[k] + 2.0 * diag[k + 1];
    }
    Ok((sum * dt / 6.0).max(0.0).sqrt())
}

/// `‖approx − reference‖ / ‖reference‖`.
pub fn relative_error(approx: &DMatrix<f64>, reference: &DMatrix<f64>, g: &SymTridiagonal, dt: f64) -> Result<f64> {
    if approx.shape() != reference.shape() {
        return Err(PgdError::invalid(format!(
            "shape mismatch: {:?} vs {:?}",
            approx.shape(),
            reference.shape()
        )));
    }
    let denom = spacetime_norm(reference, g, dt)?;
    if denom == 0.0 {
        return Err(PgdError::UndefinedReference);
    }
    Ok(spacetime_norm(&(approx - reference), g, dt)? / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `½ pᵀ M̄̄ p + ½ qᵀ K q` with the companion being the momentum.
    Hamiltonian,
    /// `½ vᵀ M v + ½ qᵀ K q` with the companion being the velocity.
    Lagrangian,
}

/// Discrete energy at every time node, over the DOFs spanned by `ops`.
pub fn energy_trajectory(
    displacement: &DMatrix<f64>,
    companion: &DMatrix<f64>,
    ops: &OperatorSet,
    kind: EnergyKind,
) -> Result<Vec<f64>> {
    if displacement.shape() != companion.shape() || displacement.nrows() != ops.dim() {
        return Err(PgdError::invalid("energy_trajectory: dimension mismatch"));
    }
    let inertia = match kind {
        EnergyKind::Hamiltonian => &ops.compliance_mass,
        EnergyKind::Lagrangian => &ops.mass,
    };
    Ok((0..displacement.ncols())
        .map(|k| 0.5 * inertia.quad(col(companion, k)) + 0.5 * ops.stiffness.quad(col(displacement, k)))
        .collect())
}

/// `max_n |a_n − b_n|`.
pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Pointwise `|approx − reference|`.
pub fn error_field_grid(approx: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if approx.shape() != reference.shape() {
        return Err(PgdError::invalid(format!(
            "shape mismatch: {:?} vs {:?}",
            approx.shape(),
            reference.shape()
        )));
    }
    Ok((approx - reference).abs())
}

/// Errors of one approximate trajectory against a reference.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub eps_q: Option<f64>,
    pub eps_p: Option<f64>,
    pub energy: Vec<f64>,
    pub reference_energy: Vec<f64>,
    /// `max_n |Hⁿ − Hⁿ_ref|`.
    pub energy_error: f64,
}

fn optional_error(approx: &DMatrix<f64>, reference: &DMatrix<f64>, g: &SymTridiagonal, dt: f64) -> Result<Option<f64>> {
    match relative_error(approx, reference, g, dt) {
        Ok(e) => Ok(Some(e)),
        Err(PgdError::UndefinedReference) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compare full displacement/momentum fields (all free DOFs) with a reference.
/// `companion` is the velocity for the Lagrangian energy, the momentum for the
/// Hamiltonian one; the reference companion is chosen to match.
pub fn compare_fields(
    problem: &Problem,
    reference: &TrajectorySet,
    displacement: &DMatrix<f64>,
    momentum: &DMatrix<f64>,
    companion: &DMatrix<f64>,
    kind: EnergyKind,
) -> Result<Comparison> {
    let g = &problem.full_ops.l2_mass;
    let dt = problem.dt();
    let eps_q = optional_error(displacement, &reference.displacement, g, dt)?;
    let eps_p = optional_error(momentum, &reference.momentum, g, dt)?;
    let ref_companion = match kind {
        EnergyKind::Hamiltonian => &reference.momentum,
        EnergyKind::Lagrangian => match reference.kind {
            TrajectoryKind::HamiltonianCn => {
                return Err(PgdError::invalid("Lagrangian energy needs a velocity reference"))
            }
            _ => &reference.companion,
        },
    };
    let energy = energy_trajectory(displacement, companion, &problem.full_ops, kind)?;
    let reference_energy = energy_trajectory(&reference.displacement, ref_companion, &problem.full_ops, kind)?;
    let energy_error = max_abs_difference(&energy, &reference_energy);
    Ok(Comparison {
        eps_q,
        eps_p,
        energy,
        reference_energy,
        energy_error,
    })
}

/// What a reduced run is measured against after each enrichment.
#[derive(Debug, Clone, Copy, Default)]
pub struct Baseline<'a> {
    pub reference: Option<&'a TrajectorySet>,
    /// Closed-form displacement over all free DOFs.
    pub exact: Option<&'a DMatrix<f64>>,
}

impl<'a> Baseline<'a> {
    pub fn reference(reference: &'a TrajectorySet) -> Self {
        Self {
            reference: Some(reference),
            exact: None,
        }
    }

    /// Fill the error fields of `rec` for the full fields `q`, `p`, `companion`.
    pub fn measure(
        &self,
        problem: &Problem,
        rec: &mut RankRecord,
        q: &DMatrix<f64>,
        p: &DMatrix<f64>,
        companion: &DMatrix<f64>,
        kind: EnergyKind,
    ) -> Result<Option<Comparison>> {
        if let Some(exact) = self.exact {
            rec.eps_q_exact = optional_error(q, exact, &problem.full_ops.l2_mass, problem.dt())?;
        }
        let Some(reference) = self.reference else {
            return Ok(None);
        };
        let cmp = compare_fields(problem, reference, q, p, companion, kind)?;
        rec.eps_q = cmp.eps_q;
        rec.eps_p = cmp.eps_p;
        rec.energy_error = Some(cmp.energy_error);
        rec.frobenius_q = Some((q - &reference.displacement).norm());
        Ok(Some(cmp))
    }
}

/// Diagnostics recorded after each enrichment (rank 0 is the lift alone).
#[derive(Debug, Clone, Default)]
pub struct RankRecord {
    pub rank: usize,
    pub eps_q: Option<f64>,
    pub eps_p: Option<f64>,
    pub energy_error: Option<f64>,
    /// Frobenius norm of the displacement DOF-matrix error.
    pub frobenius_q: Option<f64>,
    /// Displacement error against a closed-form solution, when one is supplied.
    pub eps_q_exact: Option<f64>,
    /// Gram-matrix condition numbers by name.
    pub conditions: Vec<(&'static str, f64)>,
    pub log: Option<EnrichmentLog>,
    pub update_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    MaxRank,
    ZeroEnrichment { rank: usize },
    Failure { rank: usize, message: String },
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: Method,
    pub ranks: Vec<RankRecord>,
    /// Energy trajectory of the final approximation.
    pub energy: Vec<f64>,
    pub reference_energy: Vec<f64>,
    pub termination: Termination,
}

impl RunReport {
    pub fn final_rank(&self) -> usize {
        self.ranks.last().map_or(0, |r| r.rank)
    }

    pub fn condition_series(&self, name: &str) -> Vec<(usize, f64)> {
        self.ranks
            .iter()
            .flat_map(|r| r.conditions.iter().filter(|(n, _)| *n == name).map(move |(_, k)| (r.rank, *k)))
            .collect()
    }

    pub fn failed(&self) -> bool {
        matches!(self.termination, Termination::Failure { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Mesh1D;
    use crate::fem::operators::assemble_unconstrained_l2_mass;
    use nalgebra::DVector;
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn unit_field_has_unit_norm() {
        let mesh = Mesh1D::uniform(1.0, 4).unwrap();
        let g = assemble_unconstrained_l2_mass(&mesh);
        let f = DMatrix::from_element(5, 9, 1.0);
        assert!((spacetime_norm(&f, &g, 1.0 / 8.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(spacetime_norm(&DMatrix::zeros(5, 9), &g, 0.125).unwrap(), 0.0);
    }

    #[test]
    fn relative_error_basics() {
        let g = SymTridiagonal::new(vec![2.0, 2.0], vec![0.5]).unwrap();
        let r = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, 0.0, -1.0, 3.0]);
        assert_eq!(relative_error(&r, &r, &g, 0.1).unwrap(), 0.0);
        assert!((relative_error(&(&r * 2.0), &r, &g, 0.1).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            relative_error(&r, &DMatrix::zeros(2, 3), &g, 0.1),
            Err(PgdError::UndefinedReference)
        ));
    }

    #[test]
    fn condition_number_examples() {
        assert!((condition_number(&DMatrix::identity(4, 4)).unwrap() - 1.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![10.0, 0.1]));
        assert!((condition_number(&d).unwrap() - 100.0).abs() < 1e-10);
        let mut rng = StdRng::seed_from_u64(3);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
        let spd = &a * a.transpose() + DMatrix::identity(5, 5) * 0.1;
        let eig = spd.clone().symmetric_eigen().eigenvalues;
        let oracle = eig.max() / eig.min();
        assert!((condition_number(&spd).unwrap() - oracle).abs() < 1e-10 * oracle);
        assert!(condition_number(&DMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn energy_kinds_agree_for_constant_density() {
        let mesh = Mesh1D::uniform(0.2, 4).unwrap();
        let mat = crate::fem::mesh::Material::new(220e9, 1e-3, 7000.0, 0.0).unwrap();
        let ops = crate::fem::OperatorSet::assemble(&mesh, &mat).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        let q = DMatrix::from_fn(4, 6, |_, _| rng.random_range(-1e-3..1e-3));
        let w = DMatrix::from_fn(4, 6, |_, _| rng.random_range(-1.0..1.0));
        let p = &w * 7.0;
        let el = energy_trajectory(&q, &w, &ops, EnergyKind::Lagrangian).unwrap();
        let eh = energy_trajectory(&q, &p, &ops, EnergyKind::Hamiltonian).unwrap();
        for (a, b) in el.iter().zip(&eh) {
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn error_grid_patterns() {
        let a = DMatrix::from_fn(3, 4, |i, j| (i * j) as f64);
        assert_eq!(error_field_grid(&a, &a).unwrap().amax(), 0.0);
        let g = error_field_grid(&a.add_scalar(0.5), &a).unwrap();
        assert!(g.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        assert!(error_field_grid(&a, &DMatrix::zeros(2, 4)).is_err());
    }

    proptest! {
        #[test]
        fn spacetime_norm_is_a_norm(
            a in prop::collection::vec(-1.0f64..1.0, 12),
            b in prop::collection::vec(-1.0f64..1.0, 12),
            c in -3.0f64..3.0,
        ) {
            let g = SymTridiagonal::new(vec![2.0 / 3.0; 3], vec![1.0 / 6.0; 2]).unwrap();
            let fa = DMatrix::from_column_slice(3, 4, &a);
            let fb = DMatrix::from_column_slice(3, 4, &b);
            let na = spacetime_norm(&fa, &g, 0.2).unwrap();
            let nb = spacetime_norm(&fb, &g, 0.2).unwrap();
            let nab = spacetime_norm(&(&fa + &fb), &g, 0.2).unwrap();
            prop_assert!(nab <= na + nb + 1e-10);
            let nc = spacetime_norm(&(&fa * c), &g, 0.2).unwrap();
            prop_assert!((nc - c.abs() * na).abs() <= 1e-10);
        }
    }
}
