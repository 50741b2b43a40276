//! Hamiltonian PGD on the end-loaded bar: separate displacement and momentum
//! modes, with the fixed-point history of each enrichment.

use pgd_core::config::CaseConfig;
use pgd_core::fem::Problem;
use pgd_core::metrics::Baseline;
use pgd_core::pgd::run_hpgd;
use pgd_core::reference::solve_hamiltonian_cn;

fn main() -> pgd_core::Result<()> {
    let case = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let cfg = CaseConfig::desk(case)?;
    let problem = Problem::new(&cfg.scenario()?)?;
    let reference = solve_hamiltonian_cn(&problem)?;

    let (state, report) = run_hpgd(&problem, &cfg.settings(), cfg.m_max, &Baseline::reference(&reference))?;
    println!("case {case}: {} mode pairs, {:?}", state.rank(), report.termination);
    for rec in report.ranks.iter().skip(1) {
        let log = rec.log.as_ref().expect("recorded for m >= 1");
        let conds: Vec<String> = rec.conditions.iter().map(|(n, k)| format!("{n} {k:.2e}")).collect();
        println!(
            "m = {:>2}  eps_q {:.3e}  eps_p {:.3e}  iters {:>2} (decoupled {:>2}, converged {})  {}",
            rec.rank,
            rec.eps_q.unwrap_or(f64::NAN),
            rec.eps_p.unwrap_or(f64::NAN),
            log.iterations,
            log.decoupled_iterations,
            log.converged,
            conds.join(", ")
        );
    }
    Ok(())
}
