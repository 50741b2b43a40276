//! Assemble the P1 operators of a short steel bar and print a few entries.

use pgd_core::fem::{Material, Mesh1D, OperatorSet};

fn main() -> pgd_core::Result<()> {
    let mesh = Mesh1D::uniform(0.2, 8)?;
    let steel = Material::new(220e9, 1e-3, 7000.0, 15e3)?;
    let ops = OperatorSet::assemble(&mesh, &steel)?;

    println!("free DOFs: {}", ops.dim());
    for (name, op) in [
        ("mass", &ops.mass),
        ("stiffness", &ops.stiffness),
        ("l2 mass", &ops.l2_mass),
        ("compliance mass", &ops.compliance_mass),
        ("damping", &ops.damping),
    ] {
        println!(
            "{name:>16}: diag[0] = {:.6e}, off[0] = {:.6e}, last = {:.6e}",
            op.get(0, 0),
            op.get(0, 1),
            op.get(ops.dim() - 1, ops.dim() - 1)
        );
    }
    // total mass seen by a rigid translation (node x = 0 excluded)
    let ones = vec![1.0; ops.dim()];
    println!("1ᵀ M 1 = {:.6e}", ops.mass.quad(&ones));
    Ok(())
}
