//! Optimal rank-m truncation of the reference trajectory.

use pgd_core::config::CaseConfig;
use pgd_core::fem::Problem;
use pgd_core::reference::{solve_hamiltonian_cn, svd_baseline};
use pgd_core::run::homogeneous_reference;

fn main() -> pgd_core::Result<()> {
    let cfg = CaseConfig::desk(2)?;
    let problem = Problem::new(&cfg.scenario()?)?;
    let hcn = solve_hamiltonian_cn(&problem)?;
    let (q, p) = homogeneous_reference(&problem, &hcn)?;
    let svd = svd_baseline(&q, &p, &problem.full_ops.l2_mass, problem.dt(), 12)?;

    let q0 = svd.displacement.spacetime_errors[0];
    let p0 = svd.momentum.spacetime_errors[0];
    println!("{:>3} {:>12} {:>12} {:>12}", "m", "sigma_m", "eps_q", "eps_p");
    for m in 1..=12 {
        println!(
            "{m:>3} {:>12.4e} {:>12.4e} {:>12.4e}",
            svd.displacement.singular_values[m - 1],
            svd.displacement.spacetime_errors[m] / q0,
            svd.momentum.spacetime_errors[m] / p0
        );
    }
    Ok(())
}
