//! Assembly of the P1 mass, stiffness and damping operators.

use crate::error::Result;
use crate::fem::mesh::{Material, Mesh1D};
use crate::linalg::SymTridiagonal;

/// All spatial operators over the free DOFs (node `x = 0` eliminated).
///
/// * `mass`: `∫ ρA φᵢφⱼ`
/// * `stiffness`: `∫ EA φᵢ′φⱼ′`
/// * `l2_mass` (M̄): `∫ φᵢφⱼ`
/// * `compliance_mass` (M̄̄): `∫ φᵢφⱼ / ρA`
/// * `damping`: `∫ ζ φᵢφⱼ`
/// * `momentum_damping`: `∫ (ζ/ρA) φᵢφⱼ`, the damping seen by the momentum equation
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    pub mass: SymTridiagonal,
    pub stiffness: SymTridiagonal,
    pub l2_mass: SymTridiagonal,
    pub compliance_mass: SymTridiagonal,
    pub damping: SymTridiagonal,
    pub momentum_damping: SymTridiagonal,
}

impl OperatorSet {
    pub fn assemble(mesh: &Mesh1D, material: &Material) -> Result<Self> {
        material.validate(Some(mesh.element_count()))?;
        let ea = material.axial_stiffness();
        let zeta = material.damping;
        Ok(Self {
            mass: assemble_weighted_mass(mesh, |e| material.inertia(e)),
            stiffness: assemble_stiffness(mesh, |_| ea),
            l2_mass: assemble_weighted_mass(mesh, |_| 1.0),
            compliance_mass: assemble_weighted_mass(mesh, |e| 1.0 / material.inertia(e)),
            damping: assemble_weighted_mass(mesh, |_| zeta),
            momentum_damping: assemble_weighted_mass(mesh, |e| zeta / material.inertia(e)),
        })
    }

    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    pub fn is_damped(&self) -> bool {
        self.damping.max_abs() > 0.0
    }

    /// Operators restricted to the leading `n` DOFs (used when the node at
    /// `x = ℓ` carries a Dirichlet condition).
    pub fn leading(&self, n: usize) -> Self {
        Self {
            mass: self.mass.leading(n),
            stiffness: self.stiffness.leading(n),
            l2_mass: self.l2_mass.leading(n),
            compliance_mass: self.compliance_mass.leading(n),
            damping: self.damping.leading(n),
            momentum_damping: self.momentum_damping.leading(n),
        }
    }
}

/// Consistent P1 mass `∫ w φᵢφⱼ` with `w` constant per element, over free DOFs.
pub fn assemble_weighted_mass(mesh: &Mesh1D, weight: impl Fn(usize) -> f64) -> SymTridiagonal {
    let n = mesh.free_dofs();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        let c = weight(e) * (b - a) / 6.0;
        // element couples global nodes e and e + 1, i.e. free indices e - 1 and e
        if e >= 1 {
            diag[e - 1] += 2.0 * c;
            off[e - 1] += c;
        }
        diag[e] += 2.0 * c;
    }
    SymTridiagonal::new(diag, off).expect("consistent sizes")
}

pub fn assemble_stiffness(mesh: &Mesh1D, weight: impl Fn(usize) -> f64) -> SymTridiagonal {
    let n = mesh.free_dofs();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        let c = weight(e) / (b - a);
        if e >= 1 {
            diag[e - 1] += c;
            off[e - 1] -= c;
        }
        diag[e] += c;
    }
    SymTridiagonal::new(diag, off).expect("consistent sizes")
}

/// `∫ φᵢφⱼ` over every node including `x = 0`; used when a field does not
/// vanish at the clamped end.
pub fn assemble_unconstrained_l2_mass(mesh: &Mesh1D) -> SymTridiagonal {
    let n = mesh.node_count();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        let c = (b - a) / 6.0;
        diag[e] += 2.0 * c;
        diag[e + 1] += 2.0 * c;
        off[e] += c;
    }
    SymTridiagonal::new(diag, off).expect("consistent sizes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ops(ne: usize, rho_a: f64) -> OperatorSet {
        let mesh = Mesh1D::uniform(1.0, ne).unwrap();
        let mat = Material::new(1.0, 1.0, rho_a, 0.0).unwrap();
        OperatorSet::assemble(&mesh, &mat).unwrap()
    }

    #[test]
    fn two_element_stiffness() {
        let k = unit_ops(2, 1.0).stiffness.to_dense();
        let expected = [[4.0, -2.0], [-2.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((k[(i, j)] - expected[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_element_mass() {
        let m = unit_ops(2, 1.0).mass.to_dense();
        let expected = [[1.0 / 3.0, 1.0 / 12.0], [1.0 / 12.0, 1.0 / 6.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn compliance_mass_scales_with_inertia() {
        let ops = unit_ops(2, 2.0);
        for i in 0..2 {
            for j in 0..2 {
                let a = ops.compliance_mass.get(i, j);
                let b = ops.l2_mass.get(i, j) / 2.0;
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_density_relations() {
        let mesh = Mesh1D::uniform(0.2, 56).unwrap();
        let mat = Material::new(220e9, 1e-3, 7000.0, 15e3).unwrap();
        let ops = OperatorSet::assemble(&mesh, &mat).unwrap();
        let rho_a = 7.0;
        let scale = ops.l2_mass.max_abs();
        let d1 = SymTridiagonal::combine(&[(1.0, &ops.mass), (-rho_a, &ops.l2_mass)]);
        let d2 = SymTridiagonal::combine(&[(1.0, &ops.compliance_mass), (-1.0 / rho_a, &ops.l2_mass)]);
        assert!(d1.max_abs() <= 1e-12 * scale * rho_a);
        assert!(d2.max_abs() <= 1e-12 * scale / rho_a);
        assert_eq!(ops.dim(), 56);
        assert!(ops.is_damped());
        // symmetric by construction; positive definiteness via Cholesky
        for op in [&ops.mass, &ops.stiffness, &ops.l2_mass, &ops.compliance_mass] {
            assert!(op.to_dense().cholesky().is_some());
        }
    }

    #[test]
    fn unconstrained_mass_integrates_constants() {
        let mesh = Mesh1D::uniform(1.0, 5).unwrap();
        let m = assemble_unconstrained_l2_mass(&mesh);
        let ones = vec![1.0; 6];
        assert!((m.quad(&ones) - 1.0).abs() < 1e-14);
    }
}
