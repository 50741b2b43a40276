//! Lagrangian PGD on the end-loaded bar, with Crank–Nicolson or Newmark
//! temporal solves. Pass `newmark` to switch integrator.

use pgd_core::config::CaseConfig;
use pgd_core::fem::Problem;
use pgd_core::metrics::Baseline;
use pgd_core::pgd::{run_lpgd, TimeScheme};
use pgd_core::reference::{solve_lagrangian_cn, solve_newmark};

fn main() -> pgd_core::Result<()> {
    let newmark = std::env::args().any(|a| a == "newmark");
    let cfg = CaseConfig::desk(2)?;
    let problem = Problem::new(&cfg.scenario()?)?;
    let (scheme, reference) = if newmark {
        (TimeScheme::Newmark, solve_newmark(&problem)?)
    } else {
        (TimeScheme::CrankNicolson, solve_lagrangian_cn(&problem)?)
    };

    let (field, report) = run_lpgd(&problem, scheme, &cfg.settings(), 12, &Baseline::reference(&reference))?;
    println!("{} with {} modes", scheme.method(), field.rank());
    println!("{:>3} {:>11} {:>11} {:>11} {:>5} {:>11}", "m", "eps_q", "eps_p", "energy err", "iters", "cond Mbar");
    for rec in report.ranks.iter().skip(1) {
        let log = rec.log.as_ref().expect("recorded for m >= 1");
        let kappa = rec.conditions.iter().find(|(n, _)| *n == "Mbar_x").map_or(f64::NAN, |c| c.1);
        println!(
            "{:>3} {:>11.3e} {:>11.3e} {:>11.3e} {:>5} {:>11.3e}",
            rec.rank,
            rec.eps_q.unwrap_or(f64::NAN),
            rec.eps_p.unwrap_or(f64::NAN),
            rec.energy_error.unwrap_or(f64::NAN),
            log.iterations,
            kappa
        );
    }
    Ok(())
}
