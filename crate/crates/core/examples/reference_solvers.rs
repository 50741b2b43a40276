//! Full-order references for the end-loaded bar: Lagrangian and Hamiltonian
//! Crank–Nicolson and Newmark, with their energy histories.

use pgd_core::config::CaseConfig;
use pgd_core::fem::Problem;
use pgd_core::metrics::{energy_trajectory, EnergyKind};
use pgd_core::reference::{solve_hamiltonian_cn, solve_lagrangian_cn, solve_newmark};

fn main() -> pgd_core::Result<()> {
    let cfg = CaseConfig::desk(2)?;
    let problem = Problem::new(&cfg.scenario()?)?;

    let lcn = solve_lagrangian_cn(&problem)?;
    let hcn = solve_hamiltonian_cn(&problem)?;
    let nm = solve_newmark(&problem)?;

    let el = energy_trajectory(&lcn.displacement, &lcn.companion, &problem.full_ops, EnergyKind::Lagrangian)?;
    let eh = energy_trajectory(&hcn.displacement, &hcn.companion, &problem.full_ops, EnergyKind::Hamiltonian)?;

    let scale = lcn.displacement.amax();
    println!("max |Q_LCN - Q_HCN| / max |Q| = {:.2e}", (&lcn.displacement - &hcn.displacement).amax() / scale);
    println!("max |Q_LCN - Q_NM|  / max |Q| = {:.2e}", (&lcn.displacement - &nm.displacement).amax() / scale);

    let times = problem.grid.times();
    let stride = times.len() / 8;
    println!("{:>12} {:>14} {:>14}", "t [s]", "H Lagrangian", "H Hamiltonian");
    for n in (0..times.len()).step_by(stride) {
        println!("{:>12.4e} {:>14.6e} {:>14.6e}", times[n], el[n], eh[n]);
    }
    Ok(())
}
