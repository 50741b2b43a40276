//! Released pre-strained bar: finite elements against the modal series.

use pgd_core::config::CaseConfig;
use pgd_core::fem::Problem;
use pgd_core::metrics::relative_error;
use pgd_core::reference::{analytical_field, analytical_series, solve_lagrangian_cn, SeriesParams};

fn main() -> pgd_core::Result<()> {
    let desk = std::env::args().any(|a| a == "--desk-scale");
    let cfg = if desk { CaseConfig::desk(4)? } else { CaseConfig::full(4)? };
    let problem = Problem::new(&cfg.scenario()?)?;
    let params = SeriesParams {
        length: cfg.geometry.length,
        wave_speed: (cfg.material.youngs_modulus / cfg.material.density).sqrt(),
        strain: cfg.loading.initial_strain,
    };

    let fe = solve_lagrangian_cn(&problem)?;
    let exact = analytical_field(&problem.mesh, &problem.grid, 200, &params)?;
    let err = relative_error(&fe.displacement, &exact, &problem.full_ops.l2_mass, problem.dt())?;
    println!(
        "N_e = {}, N_t = {}: relative space-time error {err:.3e}",
        cfg.geometry.elements, cfg.time.steps
    );

    let tip = cfg.geometry.length;
    for terms in [1, 10, 50, 200] {
        println!("u(l, 0) with {terms:>3} terms: {:.6e}", analytical_series(tip, 0.0, terms, &params)?);
    }
    println!("exact u(l, 0)          : {:.6e}", params.strain * tip);
    Ok(())
}
