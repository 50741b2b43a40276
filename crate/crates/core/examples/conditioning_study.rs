//! Gram conditioning and energy error against rank for the three methods on
//! the end-loaded bar. Full scale by default; `--desk-scale` for a quick run,
//! `--m-max N` to change the rank budget.

use pgd_core::config::{CaseConfig, Overrides};
use pgd_core::pgd::Method;
use pgd_core::run::run_case;

fn main() -> pgd_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let m_max = args
        .iter()
        .position(|a| a == "--m-max")
        .and_then(|i| args.get(i + 1))
        .and_then(|s| s.parse().ok());
    let overrides = Overrides {
        case: Some(2),
        desk_scale: args.iter().any(|a| a == "--desk-scale"),
        m_max,
        ..Overrides::default()
    };
    let cfg = CaseConfig::resolve(None, &overrides)?;
    let run = run_case(&cfg)?;

    for method in Method::ALL {
        let Some(r) = run.method(method) else { continue };
        let watched = if method == Method::Hpgd { "C_x" } else { "Mbar_x" };
        let first_failed_update = r.report.ranks.iter().find(|x| x.update_error.is_some()).map(|x| x.rank);
        println!("{method}: first rejected update at {first_failed_update:?}");
        for rec in r.report.ranks.iter().filter(|x| x.rank > 0 && (x.rank % 5 == 0 || x.rank == 1)) {
            let kappa = rec.conditions.iter().find(|(n, _)| *n == watched).map_or(f64::NAN, |c| c.1);
            println!(
                "  m = {:>3}  cond {watched} {:>10.3e}  energy err {:>10.3e}",
                rec.rank,
                kappa,
                rec.energy_error.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
